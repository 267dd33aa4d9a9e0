// braggwalk: command-line front end for the Bragg cavity quantum-walk model.
//
//   braggwalk simulate --config run.ini [--out DIR] [--checkpoint FILE] [--resume FILE]
//   braggwalk sweep    --config run.ini [--out DIR] [--workers N] [--gaps 1,1.5,2]
//   braggwalk spectrum --trace FILE [--out DIR] [--threshold F] [--merge-pairs]
//   braggwalk fit      --trace FILE --from B --to B [--out DIR]
//   braggwalk convolve --trace FILE (--beam FILE | --sigma S) [--out DIR]
//   braggwalk plan     --config run.ini
//   braggwalk check    --config run.ini
//
// Exit status: 0 success, 2 configuration/input error, 3 resource budget
// exceeded, 4 numeric failure.

#include <braggwalk/braggwalk.hpp>

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace braggwalk;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitResource = 3;
constexpr int kExitNumeric = 4;

fs::path prepare_out(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory " + dir);
    return fs::path(dir);
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << j.dump(2) << "\n";
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << text;
}

std::vector<double> positions(std::size_t count, std::size_t first_column, double step) {
    std::vector<double> x(count);
    for (std::size_t c = 0; c < count; ++c) x[c] = static_cast<double>(first_column + c + 1) * step;
    return x;
}

json plan_json(const LatticePlan& plan) {
    json j;
    j["height"] = plan.height();
    j["rows_bottom_blade"] = plan.rows_bottom_blade;
    j["rows_gap"] = plan.rows_gap;
    j["rows_top_blade"] = plan.rows_top_blade;
    j["columns"] = plan.columns;
    j["layers_per_pendellosung"] = plan.resolution.layers_per_pendellosung;
    j["gamma"] = plan.coin.gamma();
    j["xi"] = plan.coin.xi();
    j["zeta"] = plan.coin.zeta();
    j["source_row"] = plan.source.row;
    j["source_mode"] = plan.source.mode == Mode::up ? "up" : "down";
    j["node_updates"] = static_cast<double>(plan.height()) * static_cast<double>(plan.columns);
    j["state_bytes"] = plan.height() * 2 * sizeof(cplx);
    return j;
}

json fit_json(const FitResult& f) {
    return json{{"r", f.r}, {"one_minus_r", 1.0 - f.r}, {"i0", f.i0}, {"residual", f.residual}};
}

json peaks_json(const std::vector<SpectrumBin>& peaks) {
    json arr = json::array();
    for (const auto& p : peaks) arr.push_back({{"frequency", p.frequency}, {"magnitude", p.magnitude}});
    return arr;
}

int cmd_simulate(const std::string& config_path, const std::optional<std::string>& out_override,
                 const std::optional<std::string>& checkpoint_out, const std::optional<std::string>& resume) {
    RunConfig cfg = load_run_config(config_path);
    if (out_override) cfg.output.directory = *out_override;
    const LatticePlan plan = plan_for(cfg);
    const fs::path out = prepare_out(cfg.output.directory);
    write_text(out / "config.ini", write_run_config(cfg));

    WalkState state = initial_state(plan);
    std::size_t start = 0;
    if (resume) {
        Checkpoint ck = load_checkpoint(*resume);
        if (ck.state.height() != plan.height())
            throw ConfigError("checkpoint height " + std::to_string(ck.state.height()) + " does not match plan height " +
                              std::to_string(plan.height()));
        state = std::move(ck.state);
        start = static_cast<std::size_t>(ck.column);
    }
    const SimulationRecord rec = run_simulation(plan, cfg.recording, std::move(state), start, cfg.limits);
    if (checkpoint_out) save_checkpoint(*checkpoint_out, rec.final_state, plan.columns);

    const double step = plan.resolution.step_length();
    const auto x = positions(rec.confined.size(), start, step);
    write_csv_file((out / "confined.csv").string(), {{"position", "Delta_H"}, {"confined", "probability"}},
                   {x, rec.confined}, "un-leaked norm after each column");
    if (cfg.recording.record_exit_traces)
        write_csv_file((out / "exit.csv").string(),
                       {{"position", "Delta_H"}, {"exit_top", "probability"}, {"exit_bottom", "probability"}},
                       {x, rec.exit_top, rec.exit_bottom}, "probability leaving each face per column");
    if (!rec.surface_trace.empty())
        write_csv_file((out / "surface.csv").string(), {{"position", "Delta_H"}, {"surface", "probability"}},
                       {x, rec.surface_trace}, "down-mode intensity just below the top blade");
    if (cfg.recording.record_map && rec.intensity_map.cols > 0) {
        std::ofstream grid(out / "intensity_map.grid");
        write_grid(grid, rec.intensity_map);
        if (cfg.output.ppm) {
            std::ofstream ppm(out / "intensity_map.ppm", std::ios::binary);
            write_ppm(ppm, rec.intensity_map, cfg.output.intensity_cap);
        }
    }

    json summary;
    summary["plan"] = plan_json(plan);
    summary["start_column"] = start;
    summary["initial_norm"] = rec.initial_norm;
    summary["final_confined"] = rec.confined.empty() ? rec.initial_norm : rec.confined.back();
    summary["leak_top"] = rec.final_state.leak_top();
    summary["leak_bottom"] = rec.final_state.leak_bottom();
    summary["reflected_intensity"] = reflected_intensity(rec.final_state);

    const auto& a = cfg.analysis;
    if (a.fit) {
        const auto trace = confined_by_bounce(rec, plan);
        std::vector<double> b, v;
        double plateau = 0.0;
        std::size_t in_window = 0;
        for (const auto& p : trace) {
            b.push_back(p.bounce);
            v.push_back(p.intensity);
            if (p.bounce >= a.fit_from && p.bounce <= a.fit_to) {
                plateau += p.intensity;
                ++in_window;
            }
        }
        write_csv_file((out / "confined_bounces.csv").string(), {{"bounce", "1"}, {"confined", "probability"}}, {b, v});
        summary["plateau_confined"] = in_window ? plateau / static_cast<double>(in_window) : 0.0;
        summary["fit_window"] = {a.fit_from, a.fit_to};
        summary["fit"] = fit_json(fit_reflectivity(trace, a.fit_from, a.fit_to));
    }
    if (a.penetration) {
        const auto profile = penetration_profile(rec, a.penetration_start_bounce, plan);
        std::vector<double> d, m;
        for (const auto& p : profile) {
            d.push_back(p.depth);
            m.push_back(p.mean_intensity);
        }
        write_csv_file((out / "penetration.csv").string(), {{"depth", "Delta_H"}, {"mean_intensity", "probability"}},
                       {d, m}, "top blade, averaged from bounce " + std::to_string(a.penetration_start_bounce));
        summary["penetration"] = {{"start_bounce", a.penetration_start_bounce},
                                  {"depth", a.penetration_depth},
                                  {"fraction_within_depth", fraction_within_depth(profile, a.penetration_depth)}};
    }
    if (a.spectrum) {
        if (rec.surface_trace.empty()) throw ConfigError("analysis.spectrum needs recording.surface_trace");
        const auto merged = merge_column_pairs(rec.surface_trace);
        const auto bins = spectrum(merged, 2.0 * step);
        std::vector<double> f, mag;
        for (const auto& bin : bins) {
            f.push_back(bin.frequency);
            mag.push_back(bin.magnitude);
        }
        write_csv_file((out / "spectrum.csv").string(), {{"frequency", "1/Delta_H"}, {"magnitude", "probability"}},
                       {f, mag}, "surface trace, adjacent columns merged");
        summary["spectral_peaks"] = peaks_json(spectral_peaks(bins, a.mode_threshold));
    }
    if (!a.beam_profile.empty()) {
        if (!cfg.recording.record_exit_traces) throw ConfigError("analysis.beam_profile needs recording.exit_traces");
        const BeamProfile beam = read_beam_profile(a.beam_profile);
        write_csv_file((out / "detector.csv").string(),
                       {{"position", "Delta_H"}, {"top", "probability"}, {"bottom", "probability"}},
                       {x, convolve_beam(rec.exit_top, step, beam), convolve_beam(rec.exit_bottom, step, beam)},
                       "exit traces convolved with the beam profile");
    }
    write_json(out / "summary.json", summary);
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::optional<std::string>& out_override,
              std::optional<unsigned> workers, const std::vector<double>& gap_override) {
    RunConfig cfg = load_run_config(config_path);
    if (out_override) cfg.output.directory = *out_override;
    if (workers) cfg.sweep.workers = *workers;
    if (!gap_override.empty()) cfg.sweep.gaps = gap_override;
    if (cfg.sweep.gaps.empty()) throw ConfigError("sweep needs [sweep] gaps or gap_from/gap_to/gap_step, or --gaps");
    if (cfg.source) throw ConfigError("[source] overrides are not supported in sweeps");
    if (cfg.bounces) throw ConfigError("sweeps need geometry.length (bounces depend on the gap)");
    const fs::path out = prepare_out(cfg.output.directory);
    write_text(out / "config.ini", write_run_config(cfg));

    const auto results = sweep_gap(cfg.geometry, cfg.sweep.gaps, cfg.resolution, cfg.recording, cfg.sweep.workers,
                                   cfg.limits);
    std::vector<double> d, v;
    std::vector<std::pair<double, double>> series;
    json errors = json::array();
    int status = 0;
    for (const auto& r : results) {
        if (r.ok()) {
            d.push_back(r.gap);
            v.push_back(r.confined);
            series.emplace_back(r.gap, r.confined);
            continue;
        }
        errors.push_back({{"gap", r.gap}, {"error", r.error}});
        const int code = r.failure == FailureKind::resource  ? kExitResource
                         : r.failure == FailureKind::numeric ? kExitNumeric
                                                             : kExitConfig;
        status = std::max(status, code);
        std::cerr << "braggwalk: " << r.error << "\n";
    }
    write_csv_file((out / "sweep.csv").string(), {{"gap", "Delta_H"}, {"confined", "probability"}}, {d, v},
                   "confined intensity after length " + detail::format_double(cfg.geometry.length) + " Delta_H");

    json summary;
    summary["gaps"] = results.size();
    summary["succeeded"] = d.size();
    summary["errors"] = errors;
    try {
        summary["oscillation_period"] = oscillation_period(series);
    } catch (const std::invalid_argument& e) {
        summary["oscillation_period"] = nullptr;
        summary["oscillation_period_error"] = e.what();
    }
    write_json(out / "summary.json", summary);
    std::cout << summary.dump(2) << "\n";
    return status;
}

int cmd_spectrum(const std::string& trace_path, const std::string& out_dir, double threshold, bool merge) {
    const auto [x, y] = read_two_column(trace_path);
    double spacing = uniform_spacing(x);
    std::vector<double> values = y;
    if (merge) {
        values = merge_column_pairs(y);
        spacing *= 2.0;
    }
    const auto bins = spectrum(values, spacing);
    const fs::path out = prepare_out(out_dir);
    std::vector<double> f, m;
    for (const auto& b : bins) {
        f.push_back(b.frequency);
        m.push_back(b.magnitude);
    }
    write_csv_file((out / "spectrum.csv").string(), {{"frequency", "1/Delta_H"}, {"magnitude", "trace units"}}, {f, m});
    json summary;
    summary["samples"] = values.size();
    summary["spacing"] = spacing;
    summary["threshold"] = threshold;
    summary["peaks"] = peaks_json(spectral_peaks(bins, threshold));
    write_json(out / "peaks.json", summary);
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_fit(const std::string& trace_path, const std::string& out_dir, double from, double to) {
    const auto [b, v] = read_two_column(trace_path);
    std::vector<BouncePoint> trace;
    for (std::size_t i = 0; i < b.size(); ++i) trace.push_back({b[i], v[i]});
    const FitResult fit = fit_reflectivity(trace, from, to);
    json summary = fit_json(fit);
    summary["window"] = {from, to};
    write_json(prepare_out(out_dir) / "fit.json", summary);
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_convolve(const std::string& trace_path, const std::string& out_dir, const std::optional<std::string>& beam_path,
                 std::optional<double> sigma) {
    const auto [x, y] = read_two_column(trace_path);
    const double spacing = x.size() > 1 ? uniform_spacing(x) : 1.0;
    if (beam_path.has_value() == sigma.has_value()) throw ConfigError("give exactly one of --beam or --sigma");
    const BeamProfile beam = beam_path ? read_beam_profile(*beam_path) : BeamProfile::gaussian(*sigma, spacing);
    const auto conv = convolve_beam(y, spacing, beam);
    write_csv_file((prepare_out(out_dir) / "convolved.csv").string(),
                   {{"position", "Delta_H"}, {"intensity", "trace units"}}, {x, conv});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum-walk simulation of neutron Bragg cavities"};
    app.require_subcommand(1);

    std::string config;
    std::optional<std::string> out, checkpoint, resume, beam;
    std::optional<unsigned> workers;
    std::optional<double> sigma;
    std::vector<double> gaps;
    std::string trace, out_dir = "out";
    double threshold = kModeThreshold, from = 500.0, to = 800.0;
    bool merge = false;

    auto* sim = app.add_subcommand("simulate", "run one cavity simulation");
    sim->add_option("--config", config, "run configuration")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", out, "output directory (overrides [output] directory)");
    sim->add_option("--checkpoint", checkpoint, "write the final state to this checkpoint file");
    sim->add_option("--resume", resume, "continue from a checkpoint file")->check(CLI::ExistingFile);

    auto* sweep = app.add_subcommand("sweep", "final confined intensity over a list of gaps");
    sweep->add_option("--config", config, "run configuration")->required()->check(CLI::ExistingFile);
    sweep->add_option("--out", out, "output directory");
    sweep->add_option("--workers", workers, "parallel runs")->check(CLI::Range(1u, 1024u));
    sweep->add_option("--gaps", gaps, "gap list in Delta_H (overrides [sweep])")->delimiter(',');

    auto* spec = app.add_subcommand("spectrum", "magnitude spectrum of a two-column trace");
    spec->add_option("--trace", trace, "position,value file")->required()->check(CLI::ExistingFile);
    spec->add_option("--out", out_dir, "output directory");
    spec->add_option("--threshold", threshold, "peak threshold as a fraction of the largest line")
        ->check(CLI::Range(0.0, 1.0));
    spec->add_flag("--merge-pairs", merge, "sum adjacent samples first (per-column lattice traces)");

    auto* fit = app.add_subcommand("fit", "reflectivity fit of a bounce,intensity trace");
    fit->add_option("--trace", trace, "bounce,intensity file")->required()->check(CLI::ExistingFile);
    fit->add_option("--from", from, "first bounce of the window");
    fit->add_option("--to", to, "last bounce of the window");
    fit->add_option("--out", out_dir, "output directory");

    auto* conv = app.add_subcommand("convolve", "convolve a trace with a beam profile");
    conv->add_option("--trace", trace, "position,intensity file")->required()->check(CLI::ExistingFile);
    conv->add_option("--beam", beam, "position,weight profile file")->check(CLI::ExistingFile);
    conv->add_option("--sigma", sigma, "Gaussian profile sigma in Delta_H")->check(CLI::PositiveNumber);
    conv->add_option("--out", out_dir, "output directory");

    auto* plan = app.add_subcommand("plan", "print the lattice plan and its cost without running");
    plan->add_option("--config", config, "run configuration")->required()->check(CLI::ExistingFile);

    auto* check = app.add_subcommand("check", "validate a configuration and print its canonical form");
    check->add_option("--config", config, "run configuration")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*sim) return cmd_simulate(config, out, checkpoint, resume);
        if (*sweep) return cmd_sweep(config, out, workers, gaps);
        if (*spec) return cmd_spectrum(trace, out_dir, threshold, merge);
        if (*fit) return cmd_fit(trace, out_dir, from, to);
        if (*conv) return cmd_convolve(trace, out_dir, beam, sigma);
        if (*plan) {
            std::cout << plan_json(plan_for(load_run_config(config))).dump(2) << "\n";
            return 0;
        }
        if (*check) {
            std::cout << write_run_config(load_run_config(config));
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "braggwalk: config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ResourceError& e) {
        std::cerr << "braggwalk: resource error: " << e.what() << "\n";
        return kExitResource;
    } catch (const NumericError& e) {
        std::cerr << "braggwalk: numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::domain_error& e) {
        std::cerr << "braggwalk: numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "braggwalk: invalid input: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "braggwalk: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
