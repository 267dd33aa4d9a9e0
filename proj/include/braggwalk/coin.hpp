#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <variant>

namespace braggwalk {

using cplx = std::complex<double>;

/// Wrap an angle into (-pi, pi].
inline double canonical_phase(double angle) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double wrapped = std::remainder(angle, two_pi);  // [-pi, pi]
    if (wrapped <= -std::numbers::pi) wrapped += two_pi;
    return wrapped;
}

/// Parameters of the node unitary. gamma sets the reflection amplitude,
/// xi and zeta are the transmission and reflection phases.
class CoinParams {
public:
    CoinParams() = default;

    CoinParams(double gamma, double xi, double zeta)
        : gamma_(gamma), xi_(canonical_phase(xi)), zeta_(canonical_phase(zeta)) {
        if (!(gamma >= 0.0 && gamma <= std::numbers::pi / 2.0))
            throw std::invalid_argument("CoinParams: gamma must lie in [0, pi/2]");
    }

    double gamma() const noexcept { return gamma_; }
    double xi() const noexcept { return xi_; }
    double zeta() const noexcept { return zeta_; }

    friend bool operator==(const CoinParams&, const CoinParams&) = default;

private:
    double gamma_ = 0.0;
    double xi_ = 0.0;
    double zeta_ = 0.0;
};

/// 2x2 node unitary acting on (a, b):
///
///     | t_a  r_b |   a = up-moving input
///     | r_a  t_b |   b = down-moving input
///
/// Row 0 feeds the up-moving output, row 1 the down-moving output.
struct CoinMatrix {
    cplx t_a{1.0, 0.0};
    cplx r_b{0.0, 0.0};
    cplx r_a{0.0, 0.0};
    cplx t_b{1.0, 0.0};

    cplx operator()(int row, int col) const {
        if (row == 0) return col == 0 ? t_a : r_b;
        return col == 0 ? r_a : t_b;
    }

    friend bool operator==(const CoinMatrix&, const CoinMatrix&) = default;
};

inline CoinMatrix make_coin(const CoinParams& p) {
    const double c = std::cos(p.gamma());
    const double s = std::sin(p.gamma());
    return CoinMatrix{
        std::polar(c, p.xi()),
        std::polar(s, p.zeta()),
        -std::polar(s, -p.zeta()),
        std::polar(c, -p.xi()),
    };
}

/// Node in free space: up-movers keep going up, down-movers keep going down.
struct Free {
    friend bool operator==(const Free&, const Free&) = default;
};

/// Bragg-diffracting crystal node.
struct Crystal {
    CoinParams coin;
    friend bool operator==(const Crystal&, const Crystal&) = default;
};

using NodeKind = std::variant<Crystal, Free>;

inline CoinMatrix coin_of(const NodeKind& kind) {
    if (const auto* crystal = std::get_if<Crystal>(&kind)) return make_coin(crystal->coin);
    return CoinMatrix{};
}

inline bool is_crystal(const NodeKind& kind) { return std::holds_alternative<Crystal>(kind); }

}  // namespace braggwalk
