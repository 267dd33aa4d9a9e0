#pragma once

// Run configuration: flat "key = value" text grouped in [sections]. '#' or ';'
// start a comment. Every key is optional unless marked required; unknown
// sections and keys are errors. See README for the full schema.

#include <braggwalk/analysis.hpp>
#include <braggwalk/engine.hpp>
#include <braggwalk/errors.hpp>
#include <braggwalk/geometry.hpp>
#include <braggwalk/physics.hpp>

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace braggwalk {

struct SourceOverride {
    Mode mode = Mode::up;
    std::optional<double> position;  ///< Δ_H above the lattice bottom; default: top blade surface
    double width = 0.0;              ///< Gaussian intensity sigma in Δ_H; 0 = point source

    friend bool operator==(const SourceOverride&, const SourceOverride&) = default;
};

struct AnalysisOptions {
    bool penetration = false;
    double penetration_start_bounce = 110.0;
    double penetration_depth = 1.0;
    bool fit = false;
    double fit_from = 500.0;
    double fit_to = 800.0;
    bool spectrum = false;
    double mode_threshold = kModeThreshold;
    std::string beam_profile;  ///< path; empty = no convolution

    friend bool operator==(const AnalysisOptions&, const AnalysisOptions&) = default;
};

struct OutputOptions {
    std::string directory = "out";
    bool ppm = true;
    double intensity_cap = 1e-3;

    friend bool operator==(const OutputOptions&, const OutputOptions&) = default;
};

struct SweepOptions {
    std::vector<double> gaps;
    unsigned workers = 1;

    friend bool operator==(const SweepOptions&, const SweepOptions&) = default;
};

struct RunConfig {
    CavityGeometry geometry;
    std::optional<double> bounces;  ///< when set, length = bounces * 2 * gap
    Resolution resolution;
    std::optional<SourceOverride> source;
    RecordingOptions recording;
    AnalysisOptions analysis;
    OutputOptions output;
    SweepOptions sweep;
    ResourceBudget limits;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

class IniReader {
public:
    struct Entry {
        std::string value;
        std::size_t line = 0;
    };

    explicit IniReader(std::istream& is) {
        std::string raw, section;
        std::size_t lineno = 0;
        while (std::getline(is, raw)) {
            ++lineno;
            std::string_view line = raw;
            if (const auto c = line.find_first_of("#;"); c != std::string_view::npos) line = line.substr(0, c);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') throw ConfigError("unterminated section header", lineno);
                section = std::string(trim(line.substr(1, line.size() - 2)));
                if (!known_section(section)) throw ConfigError("unknown section [" + section + "]", lineno);
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", lineno);
            if (section.empty()) throw ConfigError("key outside of any section", lineno);
            const std::string key = section + "." + std::string(trim(line.substr(0, eq)));
            const std::string value(trim(line.substr(eq + 1)));
            if (value.empty()) throw ConfigError("empty value for " + key, lineno);
            if (entries_.count(key)) throw ConfigError("duplicate key " + key, lineno);
            entries_[key] = {value, lineno};
            sections_[section] = lineno;
        }
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    bool has_section(const std::string& s) const { return sections_.count(s) != 0; }
    std::size_t line_of(const std::string& key) const {
        const auto it = entries_.find(key);
        return it == entries_.end() ? 0 : it->second.line;
    }

    /// Rejects any key not in `allowed`.
    void check_keys(const std::vector<std::string>& allowed) const {
        for (const auto& [key, e] : entries_) {
            bool ok = false;
            for (const auto& a : allowed) ok = ok || a == key;
            if (!ok) throw ConfigError("unknown key " + key, e.line);
        }
    }

    std::optional<double> number(const std::string& key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        return parse_number(it->second.value, key, it->second.line);
    }

    std::optional<long long> integer(const std::string& key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        const std::string& v = it->second.value;
        long long out = 0;
        const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
            throw ConfigError(key + ": expected an integer, got '" + v + "'", it->second.line);
        return out;
    }

    std::optional<bool> boolean(const std::string& key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        const std::string& v = it->second.value;
        if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
        if (v == "false" || v == "no" || v == "off" || v == "0") return false;
        throw ConfigError(key + ": expected true/false, got '" + v + "'", it->second.line);
    }

    std::optional<std::string> text(const std::string& key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        return it->second.value;
    }

    std::optional<std::vector<double>> list(const std::string& key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        std::vector<double> out;
        std::string_view rest = it->second.value;
        while (true) {
            const auto comma = rest.find(',');
            const std::string item(trim(rest.substr(0, comma)));
            out.push_back(parse_number(item, key, it->second.line));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        return out;
    }

private:
    static bool known_section(const std::string& s) {
        for (const char* k : {"geometry", "resolution", "coin", "source", "recording", "analysis", "output", "sweep",
                              "limits"})
            if (s == k) return true;
        return false;
    }

    static double parse_number(const std::string& v, const std::string& key, std::size_t line) {
        double out = 0.0;
        const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || !std::isfinite(out))
            throw ConfigError(key + ": expected a number, got '" + v + "'", line);
        return out;
    }

    std::map<std::string, Entry> entries_;
    std::map<std::string, std::size_t> sections_;
};

}  // namespace detail

/// Parses and validates a configuration. All errors are ConfigError carrying
/// the offending line where one exists.
inline RunConfig parse_run_config(std::istream& is) {
    const detail::IniReader ini(is);
    ini.check_keys({"geometry.blade_thickness", "geometry.gap", "geometry.length", "geometry.bounces",
                    "resolution.layers_per_pendellosung", "resolution.transfer_lengths_per_period", "coin.xi",
                    "coin.zeta", "source.mode", "source.position", "source.width", "recording.map_column_stride",
                    "recording.map_row_stride", "recording.map", "recording.surface_trace", "recording.exit_traces",
                    "analysis.penetration", "analysis.penetration_start_bounce", "analysis.penetration_depth",
                    "analysis.fit", "analysis.fit_from", "analysis.fit_to", "analysis.spectrum",
                    "analysis.mode_threshold", "analysis.beam_profile", "output.directory", "output.ppm",
                    "output.intensity_cap", "sweep.gaps", "sweep.gap_from", "sweep.gap_to", "sweep.gap_step",
                    "sweep.workers", "limits.max_node_updates", "limits.max_height", "limits.max_map_samples"});

    auto fail = [&](const std::string& key, const std::string& msg) -> ConfigError {
        return ConfigError(key + " " + msg, ini.line_of(key));
    };
    auto require = [&](const std::string& key) {
        const auto v = ini.number(key);
        if (!v) throw ConfigError(key + " is required");
        return *v;
    };

    RunConfig c;
    c.geometry.blade_thickness = require("geometry.blade_thickness");
    if (!(c.geometry.blade_thickness > 0.0)) throw fail("geometry.blade_thickness", "must be > 0");
    c.geometry.gap = require("geometry.gap");
    if (!(c.geometry.gap >= 0.0)) throw fail("geometry.gap", "must be >= 0");

    const auto length = ini.number("geometry.length");
    c.bounces = ini.number("geometry.bounces");
    if (length && c.bounces) throw fail("geometry.bounces", "conflicts with geometry.length; give one");
    if (!length && !c.bounces) throw ConfigError("geometry.length or geometry.bounces is required");
    if (length) {
        if (!(*length > 0.0)) throw fail("geometry.length", "must be > 0");
        c.geometry.length = *length;
    } else {
        if (!(*c.bounces > 0.0)) throw fail("geometry.bounces", "must be > 0");
        if (!(c.geometry.gap > 0.0)) throw fail("geometry.bounces", "needs a non-zero gap");
        c.geometry.length = *c.bounces * 2.0 * c.geometry.gap;
    }

    if (auto n = ini.integer("resolution.layers_per_pendellosung")) {
        if (*n < 4 || *n > 100000) throw fail("resolution.layers_per_pendellosung", "must lie in [4, 100000]");
        c.resolution.layers_per_pendellosung = static_cast<int>(*n);
    }
    if (auto f = ini.number("resolution.transfer_lengths_per_period")) {
        if (!(*f > 0.0)) throw fail("resolution.transfer_lengths_per_period", "must be > 0");
        c.resolution.transfer_lengths_per_period = *f;
    }
    try {
        (void)c.resolution.coin_gamma();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("resolution: ") + e.what(), ini.line_of("resolution.layers_per_pendellosung"));
    }

    if (auto v = ini.number("coin.xi")) c.geometry.xi = canonical_phase(*v);
    if (auto v = ini.number("coin.zeta")) c.geometry.zeta = canonical_phase(*v);

    if (ini.has_section("source")) {
        SourceOverride s;
        if (auto m = ini.text("source.mode")) {
            if (*m == "up")
                s.mode = Mode::up;
            else if (*m == "down")
                s.mode = Mode::down;
            else
                throw fail("source.mode", "must be 'up' or 'down'");
        }
        s.position = ini.number("source.position");
        if (s.position && !(*s.position >= 0.0)) throw fail("source.position", "must be >= 0");
        if (auto w = ini.number("source.width")) {
            if (!(*w >= 0.0)) throw fail("source.width", "must be >= 0");
            s.width = *w;
        }
        c.source = s;
    }

    c.recording = RecordingOptions::per_pendellosung(c.resolution);
    if (auto v = ini.integer("recording.map_column_stride")) {
        if (*v < 1) throw fail("recording.map_column_stride", "must be >= 1");
        c.recording.map_column_stride = static_cast<std::size_t>(*v);
    }
    if (auto v = ini.integer("recording.map_row_stride")) {
        if (*v < 1) throw fail("recording.map_row_stride", "must be >= 1");
        c.recording.map_row_stride = static_cast<std::size_t>(*v);
    }
    if (auto v = ini.boolean("recording.map")) c.recording.record_map = *v;
    if (auto v = ini.boolean("recording.surface_trace")) c.recording.record_surface_trace = *v;
    if (auto v = ini.boolean("recording.exit_traces")) c.recording.record_exit_traces = *v;

    auto& a = c.analysis;
    if (auto v = ini.boolean("analysis.penetration")) a.penetration = *v;
    if (auto v = ini.number("analysis.penetration_start_bounce")) {
        if (!(*v >= 0.0)) throw fail("analysis.penetration_start_bounce", "must be >= 0");
        a.penetration_start_bounce = *v;
    }
    if (auto v = ini.number("analysis.penetration_depth")) {
        if (!(*v > 0.0)) throw fail("analysis.penetration_depth", "must be > 0");
        a.penetration_depth = *v;
    }
    if (auto v = ini.boolean("analysis.fit")) a.fit = *v;
    if (auto v = ini.number("analysis.fit_from")) a.fit_from = *v;
    if (auto v = ini.number("analysis.fit_to")) a.fit_to = *v;
    if (!(a.fit_from >= 0.0 && a.fit_to > a.fit_from)) throw fail("analysis.fit_to", "must exceed fit_from >= 0");
    if (auto v = ini.boolean("analysis.spectrum")) a.spectrum = *v;
    if (auto v = ini.number("analysis.mode_threshold")) {
        if (!(*v > 0.0 && *v < 1.0)) throw fail("analysis.mode_threshold", "must lie in (0, 1)");
        a.mode_threshold = *v;
    }
    if (auto v = ini.text("analysis.beam_profile")) a.beam_profile = *v;
    if ((a.penetration || a.fit) && !(c.geometry.gap > 0.0))
        throw ConfigError("analysis.penetration and analysis.fit need a non-zero gap (bounces are undefined)");

    if (auto v = ini.text("output.directory")) c.output.directory = *v;
    if (auto v = ini.boolean("output.ppm")) c.output.ppm = *v;
    if (auto v = ini.number("output.intensity_cap")) {
        if (!(*v > 0.0)) throw fail("output.intensity_cap", "must be > 0");
        c.output.intensity_cap = *v;
    }

    const auto gaps = ini.list("sweep.gaps");
    const auto from = ini.number("sweep.gap_from");
    const auto to = ini.number("sweep.gap_to");
    const auto step = ini.number("sweep.gap_step");
    if (gaps && (from || to || step)) throw fail("sweep.gaps", "conflicts with gap_from/gap_to/gap_step");
    if (gaps) {
        c.sweep.gaps = *gaps;
    } else if (from || to || step) {
        if (!(from && to && step)) throw ConfigError("sweep.gap_from, gap_to and gap_step must be given together");
        if (!(*step > 0.0) || !(*to >= *from)) throw fail("sweep.gap_step", "must be > 0 with gap_to >= gap_from");
        const auto count = static_cast<std::size_t>(std::floor((*to - *from) / *step + 1e-9)) + 1;
        if (count > 100000) throw fail("sweep.gap_step", "yields more than 100000 gaps");
        for (std::size_t i = 0; i < count; ++i) c.sweep.gaps.push_back(*from + static_cast<double>(i) * *step);
    }
    for (double g : c.sweep.gaps)
        if (!(g >= 0.0)) throw fail(gaps ? "sweep.gaps" : "sweep.gap_from", "entries must be >= 0");
    if (auto w = ini.integer("sweep.workers")) {
        if (*w < 1 || *w > 1024) throw fail("sweep.workers", "must lie in [1, 1024]");
        c.sweep.workers = static_cast<unsigned>(*w);
    }

    if (auto v = ini.number("limits.max_node_updates")) {
        if (!(*v > 0.0)) throw fail("limits.max_node_updates", "must be > 0");
        c.limits.max_node_updates = *v;
    }
    if (auto v = ini.integer("limits.max_height")) {
        if (*v < 1) throw fail("limits.max_height", "must be >= 1");
        c.limits.max_height = static_cast<std::size_t>(*v);
    }
    if (auto v = ini.integer("limits.max_map_samples")) {
        if (*v < 1) throw fail("limits.max_map_samples", "must be >= 1");
        c.limits.max_map_samples = static_cast<std::size_t>(*v);
    }
    return c;
}

inline RunConfig parse_run_config(const std::string& text_or_path, bool is_path) {
    if (!is_path) {
        std::istringstream is(text_or_path);
        return parse_run_config(is);
    }
    std::ifstream is(text_or_path);
    if (!is) throw ConfigError("cannot open config " + text_or_path);
    return parse_run_config(is);
}

inline RunConfig load_run_config(const std::string& path) { return parse_run_config(path, true); }

/// Canonical text form; parse_run_config(write_run_config(c)) == c.
inline std::string write_run_config(const RunConfig& c) {
    using detail::format_double;
    std::ostringstream os;
    auto boolean = [](bool b) { return b ? "true" : "false"; };
    os << "[geometry]\n"
       << "blade_thickness = " << format_double(c.geometry.blade_thickness) << "\n"
       << "gap = " << format_double(c.geometry.gap) << "\n";
    if (c.bounces)
        os << "bounces = " << format_double(*c.bounces) << "\n";
    else
        os << "length = " << format_double(c.geometry.length) << "\n";
    os << "\n[resolution]\n"
       << "layers_per_pendellosung = " << c.resolution.layers_per_pendellosung << "\n"
       << "transfer_lengths_per_period = " << format_double(c.resolution.transfer_lengths_per_period) << "\n"
       << "\n[coin]\n"
       << "xi = " << format_double(c.geometry.xi) << "\n"
       << "zeta = " << format_double(c.geometry.zeta) << "\n";
    if (c.source) {
        os << "\n[source]\nmode = " << (c.source->mode == Mode::up ? "up" : "down") << "\n";
        if (c.source->position) os << "position = " << format_double(*c.source->position) << "\n";
        os << "width = " << format_double(c.source->width) << "\n";
    }
    os << "\n[recording]\n"
       << "map_column_stride = " << c.recording.map_column_stride << "\n"
       << "map_row_stride = " << c.recording.map_row_stride << "\n"
       << "map = " << boolean(c.recording.record_map) << "\n"
       << "surface_trace = " << boolean(c.recording.record_surface_trace) << "\n"
       << "exit_traces = " << boolean(c.recording.record_exit_traces) << "\n"
       << "\n[analysis]\n"
       << "penetration = " << boolean(c.analysis.penetration) << "\n"
       << "penetration_start_bounce = " << format_double(c.analysis.penetration_start_bounce) << "\n"
       << "penetration_depth = " << format_double(c.analysis.penetration_depth) << "\n"
       << "fit = " << boolean(c.analysis.fit) << "\n"
       << "fit_from = " << format_double(c.analysis.fit_from) << "\n"
       << "fit_to = " << format_double(c.analysis.fit_to) << "\n"
       << "spectrum = " << boolean(c.analysis.spectrum) << "\n"
       << "mode_threshold = " << format_double(c.analysis.mode_threshold) << "\n";
    if (!c.analysis.beam_profile.empty()) os << "beam_profile = " << c.analysis.beam_profile << "\n";
    os << "\n[output]\n"
       << "directory = " << c.output.directory << "\n"
       << "ppm = " << boolean(c.output.ppm) << "\n"
       << "intensity_cap = " << format_double(c.output.intensity_cap) << "\n"
       << "\n[sweep]\n";
    if (!c.sweep.gaps.empty()) {
        os << "gaps = ";
        for (std::size_t i = 0; i < c.sweep.gaps.size(); ++i)
            os << (i ? ", " : "") << format_double(c.sweep.gaps[i]);
        os << "\n";
    }
    os << "workers = " << c.sweep.workers << "\n"
       << "\n[limits]\n"
       << "max_node_updates = " << format_double(c.limits.max_node_updates) << "\n"
       << "max_height = " << c.limits.max_height << "\n"
       << "max_map_samples = " << c.limits.max_map_samples << "\n";
    return os.str();
}

/// Lattice plan for the configured geometry, with the source override and
/// bounce-derived length applied.
inline LatticePlan plan_for(const RunConfig& c) {
    LatticePlan plan = build_lattice_plan(c.geometry, c.resolution, c.limits);
    if (c.bounces) {
        plan.columns = static_cast<std::size_t>(std::llround(*c.bounces * 2.0 * static_cast<double>(plan.rows_gap)));
        detail::check_budget(plan.height(), plan.columns, c.limits);
    }
    if (c.source) {
        plan.source.mode = c.source->mode;
        if (c.source->position) {
            const long long row = c.resolution.steps(*c.source->position);
            if (row < 0 || static_cast<std::size_t>(row) >= plan.height())
                throw ConfigError("source.position lies outside the lattice (height " +
                                  std::to_string(plan.height()) + " rows)");
            plan.source.row = static_cast<std::size_t>(row);
        }
        plan.source.width_rows = c.source->width * c.resolution.layers_per_pendellosung;
    }
    return plan;
}

}  // namespace braggwalk
