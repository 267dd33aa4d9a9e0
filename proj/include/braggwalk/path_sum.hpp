#pragma once

// Brute-force path enumeration. Test-scale oracle for the column propagator:
// every lattice path is walked separately and its coefficient product summed.

#include <braggwalk/coin.hpp>
#include <braggwalk/walk.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace braggwalk {

struct NodeMode {
    std::size_t row = 0;
    Mode mode = Mode::up;
};

inline constexpr std::uint64_t kDefaultPathBound = std::uint64_t{1} << 20;

namespace detail {

inline void accumulate_paths(std::span<const ColumnSpec> specs, std::size_t column, std::size_t row, Mode mode,
                             cplx weight, const NodeMode& target, cplx& sum) {
    if (column == specs.size()) {
        if (row == target.row && mode == target.mode) sum += weight;
        return;
    }
    const ColumnSpec& spec = specs[column];
    const std::size_t h = spec.height();
    const CoinMatrix u = spec.coin(row);
    const cplx to_up = mode == Mode::up ? u.t_a : u.r_b;
    const cplx to_down = mode == Mode::up ? u.r_a : u.t_b;
    if (row + 1 < h) accumulate_paths(specs, column + 1, row + 1, Mode::up, weight * to_up, target, sum);
    if (row > 0) accumulate_paths(specs, column + 1, row - 1, Mode::down, weight * to_down, target, sum);
}

}  // namespace detail

/// Amplitude at `target` after the columns in `specs`, for unit amplitude
/// injected at `source` before the first column. Paths that step off the
/// lattice edge are lost (they are the leaks of the propagator).
inline cplx path_sum_amplitude(std::span<const ColumnSpec> specs, NodeMode source, NodeMode target,
                               std::uint64_t max_paths = kDefaultPathBound) {
    if (specs.empty()) return (source.row == target.row && source.mode == target.mode) ? 1.0 : 0.0;
    const std::size_t h = specs.front().height();
    for (const auto& s : specs)
        if (s.height() != h) throw std::invalid_argument("path_sum_amplitude: columns differ in height");
    if (source.row >= h || target.row >= h) throw std::out_of_range("path_sum_amplitude: node index outside lattice");
    if (specs.size() >= 64 || (std::uint64_t{1} << specs.size()) > max_paths)
        throw std::invalid_argument("path_sum_amplitude: 2^" + std::to_string(specs.size()) +
                                    " paths exceed the oracle bound");
    cplx sum = 0.0;
    detail::accumulate_paths(specs, 0, source.row, source.mode, 1.0, target, sum);
    return sum;
}

}  // namespace braggwalk
