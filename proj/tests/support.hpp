#pragma once

#include <braggwalk/braggwalk.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace testing_support {

using braggwalk::cplx;

inline constexpr double pi = std::numbers::pi;

/// Seeded generator; every randomized test gets a reproducible stream.
inline std::mt19937_64 rng(std::uint64_t salt = 0) { return std::mt19937_64(0x5eed'b4a9'0000ULL + salt); }

inline braggwalk::CoinParams random_coin(std::mt19937_64& g) {
    std::uniform_real_distribution<double> gamma(0.0, pi / 2.0), phase(-4.0 * pi, 4.0 * pi);
    return braggwalk::CoinParams(gamma(g), phase(g), phase(g));
}

inline braggwalk::ColumnSpec random_column(std::mt19937_64& g, std::size_t h, double free_fraction = 0.3) {
    std::bernoulli_distribution is_free(free_fraction);
    std::vector<braggwalk::NodeKind> kinds;
    for (std::size_t m = 0; m < h; ++m) {
        if (is_free(g))
            kinds.emplace_back(braggwalk::Free{});
        else
            kinds.emplace_back(braggwalk::Crystal{random_coin(g)});
    }
    return braggwalk::ColumnSpec(std::move(kinds));
}

inline braggwalk::ColumnSpec uniform_column(std::size_t h, const braggwalk::CoinParams& p) {
    return braggwalk::ColumnSpec(std::vector<braggwalk::NodeKind>(h, braggwalk::Crystal{p}));
}

inline braggwalk::ColumnSpec free_column(std::size_t h) {
    return braggwalk::ColumnSpec(std::vector<braggwalk::NodeKind>(h, braggwalk::Free{}));
}

/// Random state of unit norm.
inline braggwalk::WalkState random_state(std::mt19937_64& g, std::size_t h) {
    std::normal_distribution<double> n;
    std::vector<cplx> up(h), down(h);
    double total = 0.0;
    for (std::size_t m = 0; m < h; ++m) {
        up[m] = {n(g), n(g)};
        down[m] = {n(g), n(g)};
        total += std::norm(up[m]) + std::norm(down[m]);
    }
    const double s = 1.0 / std::sqrt(total);
    for (std::size_t m = 0; m < h; ++m) {
        up[m] *= s;
        down[m] *= s;
    }
    return braggwalk::restore_walk_state(std::move(up), std::move(down), 0.0, 0.0);
}

inline double max_abs_diff(const braggwalk::WalkState& x, const braggwalk::WalkState& y) {
    double d = 0.0;
    for (std::size_t m = 0; m < x.height(); ++m) {
        d = std::max(d, std::abs(x.up()[m] - y.up()[m]));
        d = std::max(d, std::abs(x.down()[m] - y.down()[m]));
    }
    return d;
}

}  // namespace testing_support
