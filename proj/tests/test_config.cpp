#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

using namespace braggwalk;
using namespace testing_support;
using Catch::Approx;

namespace {

RunConfig parse(const std::string& text) { return parse_run_config(text, false); }

ConfigError parse_error(const std::string& text) {
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("expected ConfigError for:\n" << text);
    return ConfigError("unreachable");
}

const std::string kMinimal = "[geometry]\nblade_thickness = 10\ngap = 4\nlength = 600\n";

}  // namespace

TEST_CASE("minimal config takes defaults") {
    const RunConfig c = parse(kMinimal);
    CHECK(c.geometry == CavityGeometry{10.0, 4.0, 600.0, 0.0, 0.0});
    CHECK(c.resolution == Resolution{});
    CHECK_FALSE(c.source.has_value());
    CHECK(c.recording == RecordingOptions::per_pendellosung(Resolution{}));
    CHECK(c.analysis == AnalysisOptions{});
    CHECK(c.sweep.workers == 1);
    CHECK(c.sweep.gaps.empty());
}

TEST_CASE("full config parses every section") {
    const RunConfig c = parse(R"(
# comment line
[geometry]
blade_thickness = 87.5   ; trailing comment
gap = 12
bounces = 1000

[resolution]
layers_per_pendellosung = 40
transfer_lengths_per_period = 1

[coin]
xi = 0.5
zeta = 7.0

[source]
mode = down
position = 3.5
width = 0.25

[recording]
map_column_stride = 100
map_row_stride = 10
map = false
surface_trace = no
exit_traces = yes

[analysis]
penetration = true
penetration_start_bounce = 110
penetration_depth = 2
fit = true
fit_from = 500
fit_to = 800
spectrum = true
mode_threshold = 0.3
beam_profile = beams/gauss.txt

[output]
directory = runs/a b
ppm = false
intensity_cap = 5e-4

[sweep]
gap_from = 0.25
gap_to = 1.25
gap_step = 0.25
workers = 8

[limits]
max_node_updates = 1e9
max_height = 5000
max_map_samples = 1000000
)");
    CHECK(c.geometry.blade_thickness == 87.5);
    CHECK(c.bounces == 1000.0);
    CHECK(c.geometry.length == 24000.0);
    CHECK(c.resolution.layers_per_pendellosung == 40);
    CHECK(c.resolution.transfer_lengths_per_period == 1.0);
    CHECK(c.geometry.zeta == Approx(7.0 - 2.0 * pi));
    REQUIRE(c.source.has_value());
    CHECK(c.source->mode == Mode::down);
    CHECK(c.source->position == 3.5);
    CHECK(c.recording.map_column_stride == 100);
    CHECK_FALSE(c.recording.record_map);
    CHECK_FALSE(c.recording.record_surface_trace);
    CHECK(c.analysis.fit);
    CHECK(c.analysis.beam_profile == "beams/gauss.txt");
    CHECK(c.output.directory == "runs/a b");
    CHECK(c.sweep.gaps == std::vector<double>{0.25, 0.5, 0.75, 1.0, 1.25});
    CHECK(c.sweep.workers == 8);
    CHECK(c.limits.max_height == 5000);

    CHECK(parse(write_run_config(c)) == c);
}

TEST_CASE("echoed configs re-parse to the same RunConfig") {
    auto g = rng(60);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        std::ostringstream os;
        os.precision(17);
        os << "[geometry]\nblade_thickness = " << 0.05 + 20 * u(g) << "\ngap = " << 10 * u(g) << "\n";
        if (u(g) < 0.5)
            os << "length = " << 1 + 1000 * u(g) << "\n";
        else
            os << "bounces = " << 1 + 100 * u(g) << "\n";
        os << "[resolution]\nlayers_per_pendellosung = " << 4 + int(60 * u(g)) << "\n";
        os << "[coin]\nxi = " << 20 * (u(g) - 0.5) << "\nzeta = " << pi << "\n";
        if (u(g) < 0.5) os << "[source]\nmode = " << (u(g) < 0.5 ? "up" : "down") << "\nwidth = " << u(g) << "\n";
        if (u(g) < 0.5) os << "[sweep]\ngaps = " << u(g) << ", " << 1 + u(g) << ",3\nworkers = 3\n";
        if (u(g) < 0.3) os << "[output]\nintensity_cap = " << u(g) + 1e-9 << "\n";
        RunConfig c;
        try {
            c = parse(os.str());
        } catch (const ConfigError&) {
            continue;  // bounces with a zero gap
        }
        const std::string echo = write_run_config(c);
        INFO(echo);
        CHECK(parse(echo) == c);
        CHECK(write_run_config(parse(echo)) == echo);
    }
}

TEST_CASE("errors carry the offending line") {
    CHECK(parse_error(kMinimal + "colour = blue\n").line() == 5);
    CHECK(parse_error(kMinimal + "[bogus]\n").line() == 5);
    CHECK(parse_error(kMinimal + "gap = 3\n").line() == 5);  // duplicate
    CHECK(parse_error(kMinimal + "[resolution]\nlayers_per_pendellosung = 2\n").line() == 6);
    CHECK(parse_error(kMinimal + "[resolution]\nlayers_per_pendellosung = 2.5\n").line() == 6);
    CHECK(parse_error(kMinimal + "[coin]\nxi = abc\n").line() == 6);
    CHECK(parse_error(kMinimal + "[recording]\nmap = maybe\n").line() == 6);
    CHECK(parse_error(kMinimal + "[source]\nmode = sideways\n").line() == 6);
    CHECK(parse_error(kMinimal + "just text\n").line() == 5);
    CHECK(parse_error(kMinimal + "[analysis\n").line() == 5);
    CHECK(parse_error(kMinimal + "[sweep]\ngaps = 1, x\n").line() == 6);
    CHECK(parse_error("blade_thickness = 1\n").line() == 1);
}

TEST_CASE("validation names the field") {
    const ConfigError e = parse_error("[geometry]\nblade_thickness = -2\ngap = 4\nlength = 10\n");
    CHECK(std::string(e.what()).find("geometry.blade_thickness") != std::string::npos);
    CHECK(e.line() == 2);
    CHECK(std::string(parse_error("[geometry]\ngap = 4\nlength = 10\n").what()).find("blade_thickness") !=
          std::string::npos);
    CHECK(std::string(parse_error("[geometry]\nblade_thickness = 2\ngap = 4\n").what()).find("length") !=
          std::string::npos);
    parse_error("[geometry]\nblade_thickness = 2\ngap = 4\nlength = 10\nbounces = 3\n");
    parse_error("[geometry]\nblade_thickness = 2\ngap = 0\nbounces = 3\n");
    parse_error(kMinimal + "[analysis]\nfit_from = 800\nfit_to = 500\n");
    parse_error(kMinimal + "[sweep]\ngaps = 1\ngap_from = 0\n");
    parse_error(kMinimal + "[sweep]\ngap_from = 0\ngap_to = 1\n");
    parse_error(kMinimal + "[sweep]\ngaps = 1, -2\n");
    parse_error(kMinimal + "[sweep]\nworkers = 0\n");
    parse_error(kMinimal + "[output]\nintensity_cap = 0\n");
    parse_error(kMinimal + "[source]\nwidth = -1\n");
    parse_error("[geometry]\nblade_thickness = 2\ngap = 0\nlength = 4\n[analysis]\nfit = true\n");
}

TEST_CASE("plan_for applies bounces and source overrides") {
    const RunConfig c = parse("[geometry]\nblade_thickness = 2\ngap = 1.5\nbounces = 10\n"
                              "[source]\nmode = down\nposition = 3\nwidth = 0.5\n");
    const LatticePlan p = plan_for(c);
    CHECK(p.rows_gap == 30);
    CHECK(p.columns == 600);
    CHECK(p.source.row == 60);
    CHECK(p.source.mode == Mode::down);
    CHECK(p.source.width_rows == 10.0);

    const LatticePlan laue = plan_for(parse("[geometry]\nblade_thickness = 1\ngap = 0\nlength = 1\n"));
    CHECK(laue.rows_gap == 0);
    CHECK(laue.height() == 40);

    CHECK_THROWS_AS(plan_for(parse(kMinimal + "[source]\nposition = 100\n")), ConfigError);
    CHECK_THROWS_AS(plan_for(parse(kMinimal + "[limits]\nmax_node_updates = 1000\n")), ResourceError);
}

TEST_CASE("config files load from disk") {
    CHECK_THROWS_AS(load_run_config("/nonexistent/run.ini"), ConfigError);
}
