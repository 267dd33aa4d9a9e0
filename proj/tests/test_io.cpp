#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

using namespace braggwalk;
using namespace testing_support;

TEST_CASE("CSV output carries units in a comment header") {
    std::ostringstream os;
    write_csv(os, {{"position", "Delta_H"}, {"confined", "probability"}}, {{0.05, 0.1}, {1.0, 0.5}}, "demo");
    CHECK(os.str() == "# demo\n# units: position [Delta_H], confined [probability]\nposition,confined\n"
                      "0.050000000000000003,1\n0.10000000000000001,0.5\n");
    CHECK_THROWS_AS(write_csv(os, {{"a", "1"}}, {{1.0}, {2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(write_csv(os, {{"a", "1"}, {"b", "1"}}, {{1.0}, {2.0, 3.0}}), std::invalid_argument);
}

TEST_CASE("CSV written by the library reads back") {
    std::ostringstream os;
    const std::vector<double> x{0.1, 0.2, 0.3}, y{1e-17, 2.5, -3.0};
    write_csv(os, {{"x", "Delta_H"}, {"y", "1"}}, {x, y});
    std::istringstream is(os.str());
    const auto [rx, ry] = read_two_column(is);
    CHECK(rx == x);
    CHECK(ry == y);
}

TEST_CASE("two-column reader reports parse locations") {
    auto line_of = [](const std::string& text) -> std::size_t {
        std::istringstream is(text);
        try {
            read_two_column(is);
        } catch (const ConfigError& e) {
            return e.line();
        }
        return 999;
    };
    CHECK(line_of("") == 0);
    CHECK(line_of("# only comments\n\n") == 2);
    CHECK(line_of("x,y\n1,2\nfoo,3\n") == 3);
    CHECK(line_of("1,2\n3\n") == 2);
    CHECK(line_of("1,2,3\n") == 1);
    CHECK(line_of("1,2\nx,y\n") == 2);  // header only allowed first
}

TEST_CASE("uniform_spacing") {
    CHECK(uniform_spacing({0.0, 0.05, 0.1, 0.15}) == 0.05);
    CHECK_THROWS_AS(uniform_spacing({0.0}), ConfigError);
    CHECK_THROWS_AS(uniform_spacing({0.0, 0.1, 0.3}), ConfigError);
    CHECK_THROWS_AS(uniform_spacing({1.0, 0.0}), ConfigError);
}

TEST_CASE("grid files round trip") {
    IntensityMap m;
    m.rows = 2;
    m.cols = 3;
    m.row_stride = 20;
    m.col_stride = 7;
    m.values = {0.0, 1e-300, 0.5, 1.0 / 3.0, 2.0, 1e-5};
    std::stringstream buf;
    write_grid(buf, m);
    std::string header;
    std::getline(buf, header);
    CHECK(header == "2 3 20 7");
    buf.seekg(0);
    const IntensityMap r = read_grid(buf);
    CHECK(r.rows == 2);
    CHECK(r.cols == 3);
    CHECK(r.row_stride == 20);
    CHECK(r.col_stride == 7);
    CHECK(r.values == m.values);
    std::istringstream short_grid("2 2 1 1\n1 2 3\n");
    CHECK_THROWS_AS(read_grid(short_grid), ConfigError);
}

TEST_CASE("colormap stops and saturation") {
    using rgb = std::array<std::uint8_t, 3>;
    CHECK(colormap(0.0, 1.0) == rgb{0, 0, 0});
    CHECK(colormap(0.25, 1.0) == rgb{0, 0, 255});
    CHECK(colormap(0.5, 1.0) == rgb{0, 255, 255});
    CHECK(colormap(0.75, 1.0) == rgb{255, 255, 0});
    CHECK(colormap(1.0, 1.0) == rgb{255, 255, 255});
    CHECK(colormap(50.0, 1.0) == rgb{255, 255, 255});
    CHECK(colormap(-1.0, 1.0) == rgb{0, 0, 0});
    CHECK(colormap(0.125, 1.0) == rgb{0, 0, 128});
}

TEST_CASE("PPM has a P6 header and bottom row last") {
    IntensityMap m;
    m.rows = 2;
    m.cols = 2;
    m.values = {1.0, 1.0, 0.0, 0.0};  // lattice row 0 bright
    std::ostringstream os;
    write_ppm(os, m, 1.0);
    const std::string s = os.str();
    const std::string header = "P6\n2 2\n255\n";
    REQUIRE(s.size() == header.size() + 12);
    CHECK(s.substr(0, header.size()) == header);
    CHECK(static_cast<unsigned char>(s[header.size()]) == 0);      // top image row = lattice row 1
    CHECK(static_cast<unsigned char>(s[header.size() + 6]) == 255);  // bottom image row = lattice row 0
    CHECK_THROWS_AS(write_ppm(os, IntensityMap{}, 1.0), std::invalid_argument);
}
