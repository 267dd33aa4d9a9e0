#pragma once

#include <braggwalk/coin.hpp>
#include <braggwalk/errors.hpp>
#include <braggwalk/physics.hpp>
#include <braggwalk/walk.hpp>

#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace braggwalk {

/// Two-blade Bragg cavity. Lengths in Δ_H. The coin angle comes from the
/// resolution; only the phases are set here.
struct CavityGeometry {
    double blade_thickness = 1.0;
    double gap = 0.0;
    double length = 1.0;
    double xi = 0.0;
    double zeta = 0.0;

    void validate() const {
        if (!(blade_thickness > 0.0)) throw std::invalid_argument("CavityGeometry: blade_thickness must be > 0");
        if (!(gap >= 0.0)) throw std::invalid_argument("CavityGeometry: gap must be >= 0");
        if (!(length > 0.0)) throw std::invalid_argument("CavityGeometry: length must be > 0");
    }

    friend bool operator==(const CavityGeometry&, const CavityGeometry&) = default;
};

/// Initial excitation. A point source by default; width_rows > 0 spreads the
/// amplitude over a normalized Gaussian envelope (sigma in rows) centred on
/// `row`, clipped to the lattice.
struct SourceSpec {
    std::size_t row = 0;
    Mode mode = Mode::up;
    cplx amplitude = 1.0;
    double width_rows = 0.0;

    friend bool operator==(const SourceSpec&, const SourceSpec&) = default;
};

/// Work and memory limits for a single run.
struct ResourceBudget {
    double max_node_updates = 4e10;          // height * columns
    std::size_t max_height = std::size_t{1} << 24;
    std::size_t max_map_samples = std::size_t{1} << 27;

    friend bool operator==(const ResourceBudget&, const ResourceBudget&) = default;
};

/// Row bands of the lattice, bottom to top: bottom blade, gap, top blade.
struct LatticePlan {
    std::size_t rows_bottom_blade = 0;
    std::size_t rows_gap = 0;
    std::size_t rows_top_blade = 0;
    std::size_t columns = 0;
    SourceSpec source;
    Resolution resolution;
    CoinParams coin;

    std::size_t height() const noexcept { return rows_bottom_blade + rows_gap + rows_top_blade; }
    std::size_t gap_first_row() const noexcept { return rows_bottom_blade; }
    /// Lowest row of the top blade: its inner, gap-facing surface.
    std::size_t top_blade_first_row() const noexcept { return rows_bottom_blade + rows_gap; }

    /// Row just below the top blade, where its reflected down-mode lands.
    std::size_t surface_row() const {
        if (top_blade_first_row() == 0) throw std::logic_error("LatticePlan: no row below the top blade");
        return top_blade_first_row() - 1;
    }

    bool is_crystal_row(std::size_t row) const noexcept {
        return row < rows_bottom_blade || row >= top_blade_first_row();
    }

    friend bool operator==(const LatticePlan&, const LatticePlan&) = default;
};

namespace detail {

inline std::size_t rounded_rows(double length, const Resolution& r, const char* what) {
    const long long n = r.steps(length);
    if (n < 0) throw std::invalid_argument(std::string("negative row count for ") + what);
    return static_cast<std::size_t>(n);
}

inline void check_budget(std::size_t height, std::size_t columns, const ResourceBudget& budget) {
    const double updates = static_cast<double>(height) * static_cast<double>(columns);
    if (height > budget.max_height || updates > budget.max_node_updates) {
        std::ostringstream os;
        os << "lattice exceeds resource budget: requires height " << height << " x " << columns
           << " columns = " << updates << " node updates, ~" << (height * 2 * 2 * sizeof(cplx)) / 1e6
           << " MB of state; budget allows height " << budget.max_height << " and " << budget.max_node_updates
           << " node updates";
        throw ResourceError(os.str());
    }
}

}  // namespace detail

/// Realizes the cavity on the lattice. The default source is an up-mode unit
/// excitation at the first column on the top blade's inner surface row.
inline LatticePlan build_lattice_plan(const CavityGeometry& g, const Resolution& res,
                                      const ResourceBudget& budget = {}) {
    g.validate();
    res.validate();
    LatticePlan p;
    p.resolution = res;
    p.coin = CoinParams(res.coin_gamma(), g.xi, g.zeta);
    p.rows_bottom_blade = detail::rounded_rows(g.blade_thickness, res, "blade");
    p.rows_top_blade = p.rows_bottom_blade;
    p.rows_gap = detail::rounded_rows(g.gap, res, "gap");
    p.columns = detail::rounded_rows(g.length, res, "length");
    if (p.rows_top_blade == 0)
        throw std::invalid_argument("build_lattice_plan: blade thinner than half a lattice step");
    if (p.columns == 0) throw std::invalid_argument("build_lattice_plan: length shorter than half a lattice step");
    detail::check_budget(p.height(), p.columns, budget);
    p.source = SourceSpec{p.top_blade_first_row(), Mode::up, 1.0, 0.0};
    return p;
}

/// A single crystal band of `thickness` Δ_H (rows) and `length` Δ_H (columns),
/// source on its lowest row. With gap 0 the cavity reduces to this slab.
inline LatticePlan build_slab_plan(double thickness, double length, const Resolution& res, double xi = 0.0,
                                   double zeta = 0.0, const ResourceBudget& budget = {}) {
    if (!(thickness > 0.0) || !(length > 0.0))
        throw std::invalid_argument("build_slab_plan: thickness and length must be > 0");
    res.validate();
    LatticePlan p;
    p.resolution = res;
    p.coin = CoinParams(res.coin_gamma(), xi, zeta);
    p.rows_top_blade = detail::rounded_rows(thickness, res, "slab");
    p.columns = detail::rounded_rows(length, res, "length");
    if (p.rows_top_blade == 0 || p.columns == 0)
        throw std::invalid_argument("build_slab_plan: slab smaller than a lattice step");
    detail::check_budget(p.height(), p.columns, budget);
    p.source = SourceSpec{0, Mode::up, 1.0, 0.0};
    return p;
}

/// Column layout of the plan. The cavity is uniform along its length, so every
/// column has the same spec.
inline ColumnSpec column_spec_at(const LatticePlan& plan, std::size_t column) {
    if (column >= plan.columns)
        throw std::out_of_range("column_spec_at: column " + std::to_string(column) + " >= " +
                                std::to_string(plan.columns));
    std::vector<NodeKind> kinds;
    kinds.reserve(plan.height());
    for (std::size_t row = 0; row < plan.height(); ++row) {
        if (plan.is_crystal_row(row))
            kinds.emplace_back(Crystal{plan.coin});
        else
            kinds.emplace_back(Free{});
    }
    return ColumnSpec(std::move(kinds));
}

/// Initial column state for the plan's source.
inline WalkState initial_state(const LatticePlan& plan) {
    const SourceSpec& s = plan.source;
    const std::size_t h = plan.height();
    if (s.row >= h) throw std::out_of_range("initial_state: source row outside lattice");
    const bool up = s.mode == Mode::up;
    if (s.width_rows <= 0.0) return WalkState::point(h, s.row, up, s.amplitude);

    WalkState state(h);
    auto plane = up ? state.up() : state.down();
    double total = 0.0;
    for (std::size_t m = 0; m < h; ++m) {
        const double x = (static_cast<double>(m) - static_cast<double>(s.row)) / s.width_rows;
        const double w = std::exp(-0.25 * x * x);  // amplitude; intensity has sigma = width_rows
        plane[m] = w;
        total += w * w;
    }
    const cplx scale = s.amplitude / std::sqrt(total);
    for (auto& v : plane) v *= scale;
    return state;
}

}  // namespace braggwalk
