#pragma once

#include <braggwalk/errors.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace braggwalk {

/// Sampled shape of the exit peak used to turn simulated exit intensity into a
/// detector prediction. Weights sit on a uniform grid `spacing` Δ_H apart,
/// starting at `origin`.
class BeamProfile {
public:
    BeamProfile(std::vector<double> weights, double spacing, double origin = 0.0)
        : weights_(std::move(weights)), spacing_(spacing), origin_(origin) {
        if (weights_.empty()) throw std::invalid_argument("BeamProfile: needs at least one sample");
        if (!(spacing_ > 0.0)) throw std::invalid_argument("BeamProfile: spacing must be positive");
        double total = 0.0;
        for (double w : weights_) {
            if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("BeamProfile: weights must be finite and >= 0");
            total += w;
        }
        if (!(total > 0.0)) throw std::invalid_argument("BeamProfile: weights sum to zero");
        for (double& w : weights_) w /= total;
    }

    static BeamProfile gaussian(double sigma, double spacing, double half_width_sigmas = 5.0) {
        if (!(sigma > 0.0)) throw std::invalid_argument("BeamProfile::gaussian: sigma must be positive");
        const auto half = static_cast<long>(std::ceil(half_width_sigmas * sigma / spacing));
        std::vector<double> w;
        for (long k = -half; k <= half; ++k) {
            const double x = static_cast<double>(k) * spacing / sigma;
            w.push_back(std::exp(-0.5 * x * x));
        }
        return BeamProfile(std::move(w), spacing, -static_cast<double>(half) * spacing);
    }

    /// `samples` equal weights.
    static BeamProfile box(std::size_t samples, double spacing) {
        if (samples == 0) throw std::invalid_argument("BeamProfile::box: width must be >= 1 sample");
        return BeamProfile(std::vector<double>(samples, 1.0), spacing,
                           -0.5 * static_cast<double>(samples - 1) * spacing);
    }

    std::span<const double> weights() const noexcept { return weights_; }
    double spacing() const noexcept { return spacing_; }
    double origin() const noexcept { return origin_; }
    double position(std::size_t i) const noexcept { return origin_ + static_cast<double>(i) * spacing_; }

    double centroid() const noexcept {
        double c = 0.0;
        for (std::size_t i = 0; i < weights_.size(); ++i) c += weights_[i] * position(i);
        return c;
    }

    /// Linear interpolation of the normalized weights; zero outside the grid.
    double value_at(double x) const noexcept {
        const double u = (x - origin_) / spacing_;
        if (weights_.size() == 1) return std::abs(u) < 1e-9 ? weights_[0] : 0.0;
        if (u < -1e-9 || u > static_cast<double>(weights_.size() - 1) + 1e-9) return 0.0;
        const double clamped = std::clamp(u, 0.0, static_cast<double>(weights_.size() - 1));
        const auto i = std::min(static_cast<std::size_t>(clamped), weights_.size() - 2);
        const double f = clamped - static_cast<double>(i);
        return (1.0 - f) * weights_[i] + f * weights_[i + 1];
    }

private:
    std::vector<double> weights_;
    double spacing_;
    double origin_;
};

/// Reads "position weight" rows (comma or whitespace separated, '#' comments).
/// Positions must be uniformly spaced.
inline BeamProfile read_beam_profile(std::istream& is) {
    std::vector<double> pos, w;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        for (char& ch : line)
            if (ch == ',') ch = ' ';
        std::istringstream row(line);
        double x, y;
        if (!(row >> x)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw ConfigError("beam profile: expected 'position weight'", lineno);
        }
        if (!(row >> y)) throw ConfigError("beam profile: missing weight", lineno);
        std::string extra;
        if (row >> extra) throw ConfigError("beam profile: unexpected third column", lineno);
        if (y < 0.0) throw ConfigError("beam profile: negative weight", lineno);
        pos.push_back(x);
        w.push_back(y);
    }
    if (w.empty()) throw ConfigError("beam profile: no samples");
    double spacing = 1.0;
    if (pos.size() > 1) {
        spacing = pos[1] - pos[0];
        if (!(spacing > 0.0)) throw ConfigError("beam profile: positions must increase");
        for (std::size_t i = 2; i < pos.size(); ++i)
            if (std::abs(pos[i] - pos[i - 1] - spacing) > 1e-6 * spacing)
                throw ConfigError("beam profile: positions are not uniformly spaced");
    }
    return BeamProfile(std::move(w), spacing, pos.front());
}

inline BeamProfile read_beam_profile(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("beam profile: cannot open " + path);
    return read_beam_profile(is);
}

/// Same-size convolution of a trace sampled every `spacing` Δ_H with the beam
/// profile, centred on the profile's centroid. The profile is resampled onto
/// the trace grid by linear interpolation and renormalized; samples beyond the
/// trace ends count as zero.
inline std::vector<double> convolve_beam(std::span<const double> trace, double spacing, const BeamProfile& profile) {
    if (trace.empty()) throw std::invalid_argument("convolve_beam: empty trace");
    if (!(spacing > 0.0)) throw std::invalid_argument("convolve_beam: spacing must be positive");

    const double centre = profile.centroid();
    const double lo = profile.position(0) - centre;
    const double hi = profile.position(profile.weights().size() - 1) - centre;
    const auto k_lo = static_cast<long>(std::floor(lo / spacing - 1e-9));
    const auto k_hi = static_cast<long>(std::ceil(hi / spacing + 1e-9));
    std::vector<double> kernel;
    double total = 0.0;
    for (long k = k_lo; k <= k_hi; ++k) {
        const double w = profile.value_at(centre + static_cast<double>(k) * spacing);
        kernel.push_back(w);
        total += w;
    }
    // Profile narrower than one trace sample: acts as identity.
    if (!(total > 0.0)) return std::vector<double>(trace.begin(), trace.end());
    for (double& w : kernel) w /= total;

    const auto n = static_cast<long>(trace.size());
    std::vector<double> out(trace.size(), 0.0);
    for (long i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < kernel.size(); ++j) {
            const long src = i - (k_lo + static_cast<long>(j));
            if (src >= 0 && src < n) acc += kernel[j] * trace[static_cast<std::size_t>(src)];
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

}  // namespace braggwalk
