#pragma once

// Physical crystal parameters -> lattice parameters. All lattice geometry is
// measured in pendellösung lengths (Δ_H); a lattice step advances one row and
// one column, so a single scale serves both directions.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace braggwalk {

/// Unit cell volume [nm^3], neutron wavelength [nm], Bragg angle [rad] and
/// structure factor magnitude [fm] (Debye-Waller corrected).
class CrystalConstants {
public:
    CrystalConstants(double v_cell_nm3, double lambda_nm, double theta_b_rad, double f_h_fm)
        : v_cell_(v_cell_nm3), lambda_(lambda_nm), theta_b_(theta_b_rad), f_h_(f_h_fm) {
        if (!(v_cell_ > 0.0)) throw std::invalid_argument("CrystalConstants: v_cell must be positive");
        if (!(lambda_ > 0.0)) throw std::invalid_argument("CrystalConstants: lambda must be positive");
        if (!(f_h_ > 0.0)) throw std::invalid_argument("CrystalConstants: f_h must be positive");
        if (!(theta_b_ > 0.0 && theta_b_ < std::numbers::pi / 2.0))
            throw std::invalid_argument("CrystalConstants: theta_b must lie in (0, pi/2)");
    }

    double v_cell() const noexcept { return v_cell_; }
    double lambda() const noexcept { return lambda_; }
    double theta_b() const noexcept { return theta_b_; }
    double f_h() const noexcept { return f_h_; }

private:
    double v_cell_, lambda_, theta_b_, f_h_;
};

/// Pendellösung length in micrometres: pi V cos(theta_B) / (lambda |F_H|).
inline double pendellosung_length(const CrystalConstants& k) {
    constexpr double nm_per_fm = 1e-6;
    constexpr double um_per_nm = 1e-3;
    const double delta_nm = std::numbers::pi * k.v_cell() * std::cos(k.theta_b()) / (k.lambda() * k.f_h() * nm_per_fm);
    return delta_nm * um_per_nm;
}

namespace silicon {

/// Si lattice parameter [nm].
inline constexpr double lattice_parameter_nm = 0.5431020511;

/// Bragg angle of the (220) reflection.
inline double bragg_angle_220(double lambda_nm) {
    const double d220 = lattice_parameter_nm / std::sqrt(8.0);
    const double s = lambda_nm / (2.0 * d220);
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("bragg_angle_220: no (220) reflection at this wavelength");
    return std::asin(s);
}

/// |F_220| back-solved once from the measured 50.38 um pendellösung length of
/// the 0.235 nm setup and frozen here.
inline constexpr double structure_factor_220_fm = 33.61990615700339;

inline CrystalConstants reflection_220(double lambda_nm = 0.235) {
    const double a = lattice_parameter_nm;
    return CrystalConstants(a * a * a, lambda_nm, bragg_angle_220(lambda_nm), structure_factor_220_fm);
}

}  // namespace silicon

// Layer/angle equivalence n * gamma = pi * d / 2, with d in units of Δ_H.

inline double gamma_for(double d, double n) {
    if (!(n >= 1.0)) throw std::invalid_argument("gamma_for: layer count must be >= 1");
    if (!(d >= 0.0)) throw std::invalid_argument("gamma_for: distance must be non-negative");
    const double gamma = std::numbers::pi * d / (2.0 * n);
    if (gamma > std::numbers::pi / 2.0)
        throw std::invalid_argument("gamma_for: gamma = " + std::to_string(gamma) + " exceeds pi/2 (under-resolved)");
    return gamma;
}

inline double layers_for(double d, double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("layers_for: gamma must be positive");
    return std::numbers::pi * d / (2.0 * gamma);
}

/// Distance covered by one layer, in Δ_H.
inline double distance_per_layer(double gamma) { return 2.0 * gamma / std::numbers::pi; }

/// Lattice resolution: rows and columns per Δ_H.
///
/// A walk through n crystal layers transfers intensity to the reflected mode
/// as sin^2(n gamma), so the equivalence relation's distance d counts
/// full-transfer lengths. One pendellösung period holds two of them (the
/// intensity returns to zero), which gives gamma = pi / n for n layers per Δ_H.
/// Setting transfer_lengths_per_period to 1 reproduces the bare relation with
/// d = Δ_H, whose lattice oscillates with period 2 Δ_H.
struct Resolution {
    int layers_per_pendellosung = 20;
    double transfer_lengths_per_period = 2.0;

    void validate() const {
        if (layers_per_pendellosung < 4)
            throw std::invalid_argument("Resolution: layers_per_pendellosung must be >= 4, got " +
                                        std::to_string(layers_per_pendellosung));
        if (!(transfer_lengths_per_period > 0.0))
            throw std::invalid_argument("Resolution: transfer_lengths_per_period must be positive");
    }

    double coin_gamma() const {
        validate();
        return gamma_for(transfer_lengths_per_period, layers_per_pendellosung);
    }

    /// Lattice steps spanning `length` Δ_H, rounded to nearest.
    long long steps(double length) const { return std::llround(length * layers_per_pendellosung); }

    /// Δ_H per lattice step.
    double step_length() const { return 1.0 / layers_per_pendellosung; }

    friend bool operator==(const Resolution&, const Resolution&) = default;
};

}  // namespace braggwalk
