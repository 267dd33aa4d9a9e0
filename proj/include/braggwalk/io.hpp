#pragma once

// Plain-text and image output. CSV files are comma separated with '#' header
// comments that carry column units. Grid files hold an intensity map as a
// "rows cols row_stride col_stride" header line followed by row-major values.

#include <braggwalk/engine.hpp>
#include <braggwalk/errors.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace braggwalk {

struct CsvColumn {
    std::string name;
    std::string unit;
};

/// Writes equal-length columns. Values use the shortest round-trip form.
inline void write_csv(std::ostream& os, const std::vector<CsvColumn>& header,
                      const std::vector<std::vector<double>>& columns, const std::string& comment = {}) {
    if (header.size() != columns.size()) throw std::invalid_argument("write_csv: header/column count mismatch");
    const std::size_t n = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns)
        if (c.size() != n) throw std::invalid_argument("write_csv: columns differ in length");
    if (!comment.empty()) os << "# " << comment << "\n";
    os << "# units:";
    for (std::size_t k = 0; k < header.size(); ++k) os << (k ? ", " : " ") << header[k].name << " [" << header[k].unit << "]";
    os << "\n";
    for (std::size_t k = 0; k < header.size(); ++k) os << (k ? "," : "") << header[k].name;
    os << "\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < columns.size(); ++k) os << (k ? "," : "") << columns[k][i];
        os << "\n";
    }
}

inline void write_csv_file(const std::string& path, const std::vector<CsvColumn>& header,
                           const std::vector<std::vector<double>>& columns, const std::string& comment = {}) {
    std::ofstream os(path);
    if (!os) throw ResourceError("cannot write " + path);
    write_csv(os, header, columns, comment);
}

/// Two numeric columns, comma or whitespace separated. '#' comments, blank
/// lines and one leading non-numeric header line are skipped. Malformed lines
/// raise ConfigError with the line number.
inline std::pair<std::vector<double>, std::vector<double>> read_two_column(std::istream& is) {
    std::vector<double> x, y;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        for (char& ch : line)
            if (ch == ',') ch = ' ';
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream row(line);
        double a, b;
        if (!(row >> a)) {
            if (!header_seen && x.empty()) {
                header_seen = true;
                continue;
            }
            throw ConfigError("expected two numeric columns", lineno);
        }
        if (!(row >> b)) throw ConfigError("missing second column", lineno);
        std::string extra;
        if (row >> extra) throw ConfigError("more than two columns", lineno);
        if (!std::isfinite(a) || !std::isfinite(b)) throw ConfigError("non-finite value", lineno);
        x.push_back(a);
        y.push_back(b);
    }
    if (x.empty()) throw ConfigError("no data rows", lineno);
    return {std::move(x), std::move(y)};
}

inline std::pair<std::vector<double>, std::vector<double>> read_two_column(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open " + path);
    try {
        return read_two_column(is);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

/// Uniform spacing of an abscissa, or ConfigError if it is not uniform.
inline double uniform_spacing(const std::vector<double>& x) {
    if (x.size() < 2) throw ConfigError("need at least two samples to infer spacing");
    const double step = x[1] - x[0];
    if (!(step > 0.0)) throw ConfigError("positions must increase");
    for (std::size_t i = 2; i < x.size(); ++i)
        if (std::abs(x[i] - x[i - 1] - step) > 1e-6 * std::abs(step))
            throw ConfigError("positions are not uniformly spaced (row " + std::to_string(i + 1) + ")");
    return step;
}

inline void write_grid(std::ostream& os, const IntensityMap& map) {
    os << map.rows << " " << map.cols << " " << map.row_stride << " " << map.col_stride << "\n"
       << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t i = 0; i < map.rows; ++i) {
        for (std::size_t j = 0; j < map.cols; ++j) os << (j ? " " : "") << map.values[i * map.cols + j];
        os << "\n";
    }
}

inline IntensityMap read_grid(std::istream& is) {
    IntensityMap map;
    if (!(is >> map.rows >> map.cols >> map.row_stride >> map.col_stride))
        throw ConfigError("grid: malformed header", 1);
    if (map.row_stride == 0 || map.col_stride == 0) throw ConfigError("grid: strides must be >= 1", 1);
    map.values.resize(map.rows * map.cols);
    for (double& v : map.values)
        if (!(is >> v)) throw ConfigError("grid: fewer values than rows x cols");
    return map;
}

/// Fixed false-colour map, linear in intensity from 0 to the cap: black, blue,
/// cyan, yellow, white at 0, 1/4, 1/2, 3/4 and 1 of the cap. Values at or
/// above the cap saturate to white.
inline std::array<std::uint8_t, 3> colormap(double v, double cap) {
    static constexpr std::array<std::array<double, 3>, 5> stops{{
        {0, 0, 0}, {0, 0, 255}, {0, 255, 255}, {255, 255, 0}, {255, 255, 255}}};
    double u = cap > 0.0 ? v / cap : 0.0;
    if (!(u > 0.0)) u = 0.0;
    u = std::min(u, 1.0) * 4.0;
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(u), 3);
    const double f = u - static_cast<double>(k);
    std::array<std::uint8_t, 3> rgb{};
    for (int c = 0; c < 3; ++c)
        rgb[c] = static_cast<std::uint8_t>(std::lround((1.0 - f) * stops[k][c] + f * stops[k + 1][c]));
    return rgb;
}

/// Binary PPM (P6), one pixel per map sample. Lattice row 0 is drawn at the
/// bottom of the image, columns run left to right.
inline void write_ppm(std::ostream& os, const IntensityMap& map, double cap) {
    if (map.rows == 0 || map.cols == 0) throw std::invalid_argument("write_ppm: empty map");
    os << "P6\n" << map.cols << " " << map.rows << "\n255\n";
    for (std::size_t r = map.rows; r-- > 0;)
        for (std::size_t j = 0; j < map.cols; ++j) {
            const auto rgb = colormap(map.values[r * map.cols + j], cap);
            os.write(reinterpret_cast<const char*>(rgb.data()), 3);
        }
}

}  // namespace braggwalk
