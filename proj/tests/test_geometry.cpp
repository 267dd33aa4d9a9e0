#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace braggwalk;
using namespace testing_support;
using Catch::Approx;

namespace {

Resolution at(int n) {
    Resolution r;
    r.layers_per_pendellosung = n;
    return r;
}

}  // namespace

TEST_CASE("plan for the long confinement cavity") {
    const LatticePlan p = build_lattice_plan({87.5, 12.0, 16000.0}, at(20));
    CHECK(p.rows_bottom_blade == 1750);
    CHECK(p.rows_gap == 240);
    CHECK(p.rows_top_blade == 1750);
    CHECK(p.height() == 3740);
    CHECK(p.columns == 320000);
}

TEST_CASE("zero gap gives a single Laue slab") {
    const LatticePlan p = build_lattice_plan({1.0, 0.0, 1.0}, at(10));
    CHECK(p.rows_gap == 0);
    CHECK(p.height() == 20);
    const ColumnSpec spec = column_spec_at(p, 0);
    for (const auto& k : spec.kinds()) CHECK(is_crystal(k));
}

TEST_CASE("plan for the short cavity at 50 layers") {
    const LatticePlan p = build_lattice_plan({10.0, 4.0, 600.0}, at(50));
    CHECK(p.height() == 1200);
    CHECK(p.columns == 30000);
}

TEST_CASE("column_spec_at places crystal exactly in the blade bands") {
    const LatticePlan p = build_lattice_plan({10.0, 4.0, 600.0}, at(20));
    for (std::size_t column : {std::size_t{0}, std::size_t{5000}, p.columns - 1}) {
        const ColumnSpec spec = column_spec_at(p, column);
        REQUIRE(spec.height() == p.height());
        for (std::size_t row = 0; row < p.height(); ++row) {
            const bool blade = row < 200 || row >= 280;
            REQUIRE(is_crystal(spec.kind(row)) == blade);
            if (blade) REQUIRE(spec.coin(row) == make_coin(p.coin));
        }
        CHECK(spec == column_spec_at(p, 0));
    }
    CHECK_THROWS_AS(column_spec_at(p, p.columns), std::out_of_range);
}

TEST_CASE("default source sits on the top blade's inner surface") {
    const LatticePlan p = build_lattice_plan({10.0, 4.0, 600.0}, at(20));
    CHECK(p.source.row == 280);
    CHECK(p.source.row == p.top_blade_first_row());
    CHECK(p.source.mode == Mode::up);
    CHECK(p.source.amplitude == cplx(1.0));
    CHECK(p.surface_row() == 279);
    const WalkState s = initial_state(p);
    CHECK(s.up()[280] == cplx(1.0));
    CHECK(s.norm() == 1.0);
}

TEST_CASE("geometry validation") {
    CHECK_THROWS_AS(build_lattice_plan({0.0, 4.0, 10.0}, at(20)), std::invalid_argument);
    CHECK_THROWS_AS(build_lattice_plan({-1.0, 4.0, 10.0}, at(20)), std::invalid_argument);
    CHECK_THROWS_AS(build_lattice_plan({1.0, -0.5, 10.0}, at(20)), std::invalid_argument);
    CHECK_THROWS_AS(build_lattice_plan({1.0, 4.0, 0.0}, at(20)), std::invalid_argument);
    CHECK_THROWS_AS(build_lattice_plan({0.01, 4.0, 10.0}, at(20)), std::invalid_argument);  // rounds to 0 rows
    CHECK_THROWS_AS(build_lattice_plan({1.0, 4.0, 10.0}, at(3)), std::invalid_argument);
    CHECK_THROWS_AS(build_slab_plan(0.0, 1.0, at(20)), std::invalid_argument);
}

TEST_CASE("budget overrun reports the required resources") {
    ResourceBudget tight;
    tight.max_node_updates = 1e6;
    try {
        build_lattice_plan({87.5, 12.0, 16000.0}, at(20), tight);
        FAIL("expected ResourceError");
    } catch (const ResourceError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("3740") != std::string::npos);
        CHECK(msg.find("320000") != std::string::npos);
        CHECK(msg.find("node updates") != std::string::npos);
    }
    ResourceBudget short_height;
    short_height.max_height = 100;
    CHECK_THROWS_AS(build_lattice_plan({10.0, 4.0, 10.0}, at(20), short_height), ResourceError);
}

TEST_CASE("row rounding stays within half a layer per band") {
    auto g = rng(30);
    std::uniform_real_distribution<double> t(0.1, 50.0), d(0.0, 20.0);
    std::uniform_int_distribution<int> n(4, 60);
    for (int i = 0; i < 500; ++i) {
        const CavityGeometry geo{t(g), d(g), 5.0};
        const Resolution r = at(n(g));
        LatticePlan p;
        try {
            p = build_lattice_plan(geo, r);
        } catch (const std::invalid_argument&) {
            continue;  // blade thinner than half a layer
        }
        const double step = r.step_length();
        CHECK(std::abs(p.rows_top_blade * step - geo.blade_thickness) <= 0.5 * step + 1e-12);
        CHECK(std::abs(p.rows_gap * step - geo.gap) <= 0.5 * step + 1e-12);
        CHECK(p.rows_bottom_blade == p.rows_top_blade);
        CHECK(p.height() == p.rows_bottom_blade + p.rows_gap + p.rows_top_blade);
    }
}

TEST_CASE("slab plan is one crystal band with the source at its bottom") {
    const LatticePlan p = build_slab_plan(2.0, 3.0, at(25), 0.3, -0.2);
    CHECK(p.height() == 50);
    CHECK(p.columns == 75);
    CHECK(p.rows_gap == 0);
    CHECK(p.source.row == 0);
    CHECK(p.coin == CoinParams(at(25).coin_gamma(), 0.3, -0.2));
}

TEST_CASE("Gaussian source envelope") {
    LatticePlan p = build_lattice_plan({2.0, 4.0, 10.0}, at(20));
    p.source.row = 80;
    p.source.mode = Mode::down;
    p.source.width_rows = 6.0;
    p.source.amplitude = cplx(0.0, 2.0);
    const WalkState s = initial_state(p);
    CHECK(s.norm() == Approx(4.0).epsilon(1e-13));
    double mean = 0.0, var = 0.0;
    for (std::size_t m = 0; m < s.height(); ++m) {
        CHECK(s.up()[m] == cplx(0.0));
        mean += m * std::norm(s.down()[m]) / 4.0;
    }
    for (std::size_t m = 0; m < s.height(); ++m) var += (m - mean) * (m - mean) * std::norm(s.down()[m]) / 4.0;
    CHECK(mean == Approx(80.0).epsilon(1e-9));
    CHECK(std::sqrt(var) == Approx(6.0).epsilon(1e-3));  // intensity sigma in rows
    p.source.row = p.height();
    CHECK_THROWS_AS(initial_state(p), std::out_of_range);
}
