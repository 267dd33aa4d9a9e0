#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace braggwalk;
using namespace testing_support;

namespace {

std::vector<ColumnSpec> uniform_lattice(std::size_t columns, std::size_t h, double gamma) {
    return std::vector<ColumnSpec>(columns, uniform_column(h, CoinParams(gamma, 0.0, 0.0)));
}

/// Largest deviation between the propagator and the oracle over every node and
/// mode of the final column.
double oracle_mismatch(const std::vector<ColumnSpec>& specs, NodeMode source) {
    const std::size_t h = specs.front().height();
    WalkState s = WalkState::point(h, source.row, source.mode == Mode::up);
    Propagator p;
    for (const auto& c : specs) p.step(s, c);
    double worst = 0.0;
    for (std::size_t m = 0; m < h; ++m) {
        worst = std::max(worst, std::abs(s.up()[m] - path_sum_amplitude(specs, source, {m, Mode::up})));
        worst = std::max(worst, std::abs(s.down()[m] - path_sum_amplitude(specs, source, {m, Mode::down})));
    }
    return worst;
}

}  // namespace

TEST_CASE("path sum: two transmissions give cos^2 gamma") {
    const double gamma = 0.37;
    const auto specs = uniform_lattice(2, 9, gamma);
    const cplx amp = path_sum_amplitude(specs, {4, Mode::up}, {6, Mode::up});
    CHECK(std::abs(amp - std::cos(gamma) * std::cos(gamma)) < 1e-15);
}

TEST_CASE("path sum: transmit then reflect gives -cos gamma sin gamma") {
    const double gamma = 0.37;
    const auto specs = uniform_lattice(2, 9, gamma);
    const cplx amp = path_sum_amplitude(specs, {4, Mode::up}, {4, Mode::down});
    CHECK(std::abs(amp + std::cos(gamma) * std::sin(gamma)) < 1e-15);
}

TEST_CASE("path sum: zero columns is the identity") {
    const std::vector<ColumnSpec> none;
    CHECK(path_sum_amplitude(none, {2, Mode::up}, {2, Mode::up}) == cplx(1.0));
    CHECK(path_sum_amplitude(none, {2, Mode::up}, {2, Mode::down}) == cplx(0.0));
}

TEST_CASE("path sum: random 6-column, height-13 lattice matches the propagator") {
    auto g = rng(10);
    std::vector<ColumnSpec> specs;
    for (int c = 0; c < 6; ++c) specs.push_back(random_column(g, 13));
    for (std::size_t row = 0; row < 13; ++row) {
        CHECK(oracle_mismatch(specs, {row, Mode::up}) < 1e-12);
        CHECK(oracle_mismatch(specs, {row, Mode::down}) < 1e-12);
    }
}

TEST_CASE("path sum: matches the propagator on random lattices up to 10 x 21") {
    auto g = rng(11);
    std::uniform_int_distribution<std::size_t> cols(1, 10), height(1, 21);
    std::uniform_real_distribution<double> free_fraction(0.0, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t h = height(g);
        std::vector<ColumnSpec> specs;
        const double ff = free_fraction(g);
        for (std::size_t c = cols(g); c > 0; --c) specs.push_back(random_column(g, h, ff));
        std::uniform_int_distribution<std::size_t> row(0, h - 1);
        const NodeMode source{row(g), trial % 2 ? Mode::up : Mode::down};
        INFO("trial " << trial << ": " << specs.size() << " columns x " << h << " rows");
        CHECK(oracle_mismatch(specs, source) < 1e-10);
    }
}

TEST_CASE("path sum: inputs outside its contract are rejected") {
    const auto specs = uniform_lattice(21, 5, 0.2);
    CHECK_THROWS_AS(path_sum_amplitude(specs, {2, Mode::up}, {2, Mode::up}), std::invalid_argument);
    CHECK_NOTHROW(path_sum_amplitude(specs, {2, Mode::up}, {2, Mode::up}, std::uint64_t{1} << 21));

    const auto small = uniform_lattice(3, 5, 0.2);
    CHECK_THROWS_AS(path_sum_amplitude(small, {5, Mode::up}, {0, Mode::up}), std::out_of_range);
    CHECK_THROWS_AS(path_sum_amplitude(small, {0, Mode::up}, {7, Mode::down}), std::out_of_range);

    std::vector<ColumnSpec> ragged{free_column(4), free_column(5)};
    CHECK_THROWS_AS(path_sum_amplitude(ragged, {0, Mode::up}, {0, Mode::up}), std::invalid_argument);
}
