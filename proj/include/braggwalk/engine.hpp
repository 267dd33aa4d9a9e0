#pragma once

#include <braggwalk/errors.hpp>
#include <braggwalk/geometry.hpp>
#include <braggwalk/walk.hpp>

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace braggwalk {

struct RecordingOptions {
    std::size_t map_column_stride = 20;
    std::size_t map_row_stride = 20;
    bool record_map = true;
    bool record_surface_trace = true;
    bool record_exit_traces = true;

    /// One map sample per Δ_H in each direction.
    static RecordingOptions per_pendellosung(const Resolution& r) {
        RecordingOptions o;
        o.map_column_stride = o.map_row_stride = static_cast<std::size_t>(r.layers_per_pendellosung);
        return o;
    }

    void validate() const {
        if (map_column_stride < 1 || map_row_stride < 1)
            throw std::invalid_argument("RecordingOptions: strides must be >= 1");
    }

    friend bool operator==(const RecordingOptions&, const RecordingOptions&) = default;
};

/// Downsampled |a|^2 + |b|^2. Sample (i, j) is lattice row i * row_stride after
/// (j + 1) * col_stride columns have been applied.
struct IntensityMap {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t row_stride = 1;
    std::size_t col_stride = 1;
    std::vector<double> values;  // row-major, rows x cols

    double at(std::size_t i, std::size_t j) const { return values.at(i * cols + j); }
    std::size_t lattice_row(std::size_t i) const noexcept { return i * row_stride; }
    std::size_t columns_applied(std::size_t j) const noexcept { return (j + 1) * col_stride; }
};

/// Per-column traces are indexed by c = columns applied - 1.
struct SimulationRecord {
    IntensityMap intensity_map;
    std::vector<double> exit_top;
    std::vector<double> exit_bottom;
    std::vector<double> confined;
    std::vector<double> surface_trace;
    WalkState final_state;
    double initial_norm = 1.0;
};

namespace detail {

inline IntensityMap make_map(const LatticePlan& plan, const RecordingOptions& o, std::size_t start_column,
                             const ResourceBudget& budget) {
    IntensityMap map;
    map.row_stride = o.map_row_stride;
    map.col_stride = o.map_column_stride;
    if (!o.record_map) return map;
    map.rows = (plan.height() + o.map_row_stride - 1) / o.map_row_stride;
    // Samples land at columns-applied counts that are multiples of the stride.
    const std::size_t last = plan.columns / o.map_column_stride;
    const std::size_t first = start_column / o.map_column_stride;
    map.cols = last - first;
    if (static_cast<double>(map.rows) * static_cast<double>(map.cols) > static_cast<double>(budget.max_map_samples)) {
        std::ostringstream os;
        os << "intensity map of " << map.rows << " x " << map.cols << " samples exceeds budget of "
           << budget.max_map_samples << "; increase map strides";
        throw ResourceError(os.str());
    }
    map.values.assign(map.rows * map.cols, 0.0);
    return map;
}

}  // namespace detail

/// Continues a run from `state`, which has already had `start_column` columns
/// applied. Traces in the returned record cover the remaining columns only.
inline SimulationRecord run_simulation(const LatticePlan& plan, const RecordingOptions& options, WalkState state,
                                       std::size_t start_column, const ResourceBudget& budget = {}) {
    options.validate();
    if (state.height() != plan.height())
        throw std::invalid_argument("run_simulation: state height does not match plan");
    if (start_column > plan.columns) throw std::invalid_argument("run_simulation: start column beyond plan");
    detail::check_budget(plan.height(), plan.columns, budget);

    SimulationRecord rec;
    rec.initial_norm = state.total_probability();
    rec.intensity_map = detail::make_map(plan, options, start_column, budget);
    const std::size_t remaining = plan.columns - start_column;
    rec.confined.reserve(remaining);
    if (options.record_exit_traces) {
        rec.exit_top.reserve(remaining);
        rec.exit_bottom.reserve(remaining);
    }
    const bool surface = options.record_surface_trace && plan.top_blade_first_row() > 0;
    if (surface) rec.surface_trace.reserve(remaining);

    const ColumnSpec spec = column_spec_at(plan, 0);
    Propagator propagator;
    std::size_t map_col = 0;
    for (std::size_t c = start_column; c < plan.columns; ++c) {
        const auto step = propagator.step(state, spec);
        rec.confined.push_back(step.remaining);
        if (options.record_exit_traces) {
            rec.exit_top.push_back(step.leaked_top);
            rec.exit_bottom.push_back(step.leaked_bottom);
        }
        if (surface) rec.surface_trace.push_back(std::norm(state.down()[plan.surface_row()]));
        if (options.record_map && (c + 1) % options.map_column_stride == 0 && map_col < rec.intensity_map.cols) {
            auto& m = rec.intensity_map;
            for (std::size_t i = 0; i < m.rows; ++i) {
                const std::size_t row = m.lattice_row(i);
                m.values[i * m.cols + map_col] = std::norm(state.up()[row]) + std::norm(state.down()[row]);
            }
            ++map_col;
        }
    }
    rec.final_state = std::move(state);
    return rec;
}

inline SimulationRecord run_simulation(const LatticePlan& plan, const RecordingOptions& options,
                                       const ResourceBudget& budget = {}) {
    return run_simulation(plan, options, initial_state(plan), 0, budget);
}

/// Total reflected (down-mode) intensity left in the lattice after a run.
inline double reflected_intensity(const WalkState& s) {
    double total = 0.0;
    for (const auto& v : s.down()) total += std::norm(v);
    return total;
}

enum class FailureKind { none, invalid, resource, numeric };

struct GapResult {
    double gap = 0.0;
    double confined = 0.0;  ///< remaining norm after the last column
    std::string error;      ///< empty on success
    FailureKind failure = FailureKind::none;

    bool ok() const noexcept { return error.empty(); }
};

/// One independent run per gap value, results in input order. Runs execute on
/// up to `workers` threads; a failing run is reported in its slot and does
/// not stop the others.
inline std::vector<GapResult> sweep_gap(const CavityGeometry& base, const std::vector<double>& gaps,
                                        const Resolution& resolution, const RecordingOptions& options,
                                        unsigned workers = 1, const ResourceBudget& budget = {}) {
    std::vector<GapResult> results(gaps.size());
    RecordingOptions lean = options;
    lean.record_map = false;
    lean.record_surface_trace = false;

    auto run_one = [&](std::size_t i) {
        GapResult& r = results[i];
        r.gap = gaps[i];
        try {
            CavityGeometry g = base;
            g.gap = gaps[i];
            const LatticePlan plan = build_lattice_plan(g, resolution, budget);
            const SimulationRecord rec = run_simulation(plan, lean, budget);
            r.confined = rec.confined.empty() ? rec.initial_norm : rec.confined.back();
        } catch (const ResourceError& e) {
            r.error = "gap " + std::to_string(gaps[i]) + ": " + e.what();
            r.failure = FailureKind::resource;
        } catch (const NumericError& e) {
            r.error = "gap " + std::to_string(gaps[i]) + ": " + e.what();
            r.failure = FailureKind::numeric;
        } catch (const std::exception& e) {
            r.error = "gap " + std::to_string(gaps[i]) + ": " + e.what();
            r.failure = FailureKind::invalid;
        }
    };

    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(gaps.size(), 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < gaps.size(); ++i) run_one(i);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < gaps.size(); i = next++) run_one(i);
        });
    pool.clear();  // joins
    return results;
}

}  // namespace braggwalk
