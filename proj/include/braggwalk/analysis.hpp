#pragma once

// Post-processing of simulation records: bounce-indexed confinement, penetration
// profiles, reflectivity fits, spectra of positional traces and oscillation
// periods of parameter sweeps.

#include <braggwalk/engine.hpp>
#include <braggwalk/geometry.hpp>

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace braggwalk {

/// Fraction of the largest non-DC spectral magnitude a line must exceed to
/// count as a cavity mode.
inline constexpr double kModeThreshold = 0.2;

struct BouncePoint {
    double bounce = 0.0;
    double intensity = 0.0;
};

struct ProfilePoint {
    double depth = 0.0;  ///< Δ_H below the blade's inner surface
    double mean_intensity = 0.0;
};

struct FitResult {
    double r = 1.0;         ///< reflectivity per bounce
    double i0 = 0.0;        ///< fitted intensity at bounce 0
    double residual = 0.0;  ///< RMS of log-intensity residuals
};

struct SpectrumBin {
    double frequency = 0.0;  ///< cycles per Δ_H
    double magnitude = 0.0;
};

/// One bounce is a full round trip across the gap: down and back up.
inline double bounce_index(std::size_t column, const LatticePlan& plan) {
    if (plan.rows_gap == 0) throw std::invalid_argument("bounce_index: undefined for a cavity without gap rows");
    return static_cast<double>(column) / (2.0 * static_cast<double>(plan.rows_gap));
}

/// Column count at which `bounce` is reached.
inline std::size_t column_for_bounce(double bounce, const LatticePlan& plan) {
    if (plan.rows_gap == 0) throw std::invalid_argument("column_for_bounce: undefined for a cavity without gap rows");
    if (bounce < 0.0) throw std::invalid_argument("column_for_bounce: negative bounce");
    return static_cast<std::size_t>(std::llround(bounce * 2.0 * static_cast<double>(plan.rows_gap)));
}

/// Confined intensity sampled at every whole bounce covered by the record.
inline std::vector<BouncePoint> confined_by_bounce(const SimulationRecord& rec, const LatticePlan& plan) {
    const std::size_t period = 2 * plan.rows_gap;
    if (period == 0) throw std::invalid_argument("confined_by_bounce: cavity has no gap rows");
    std::vector<BouncePoint> out;
    for (std::size_t k = 1; k * period <= rec.confined.size(); ++k)
        out.push_back({static_cast<double>(k), rec.confined[k * period - 1]});
    return out;
}

/// Mean intensity of each sampled top-blade row over all map columns at or past
/// `start_bounce`.
inline std::vector<ProfilePoint> penetration_profile(const SimulationRecord& rec, double start_bounce,
                                                     const LatticePlan& plan) {
    const IntensityMap& map = rec.intensity_map;
    const std::size_t start = column_for_bounce(start_bounce, plan);
    std::size_t first_col = map.cols;
    for (std::size_t j = 0; j < map.cols; ++j)
        if (map.columns_applied(j) >= start) {
            first_col = j;
            break;
        }
    if (first_col == map.cols)
        throw std::invalid_argument("penetration_profile: start bounce " + std::to_string(start_bounce) +
                                    " lies beyond the recorded map");

    const std::size_t surface = plan.top_blade_first_row();
    const double step = plan.resolution.step_length();
    std::vector<ProfilePoint> profile;
    for (std::size_t i = 0; i < map.rows; ++i) {
        const std::size_t row = map.lattice_row(i);
        if (row < surface || row >= plan.height()) continue;
        double sum = 0.0;
        for (std::size_t j = first_col; j < map.cols; ++j) sum += map.values[i * map.cols + j];
        profile.push_back({static_cast<double>(row - surface) * step, sum / static_cast<double>(map.cols - first_col)});
    }
    return profile;
}

/// Share of the profile's total within `depth` of the surface.
inline double fraction_within_depth(std::span<const ProfilePoint> profile, double depth) {
    double inside = 0.0, total = 0.0;
    for (const auto& p : profile) {
        total += p.mean_intensity;
        if (p.depth <= depth + 1e-12) inside += p.mean_intensity;
    }
    if (!(total > 0.0)) throw std::invalid_argument("fraction_within_depth: profile carries no intensity");
    return inside / total;
}

/// Least-squares fit of I(b) = i0 * r^b over bounces in [lo, hi], done as a
/// straight-line fit of log I with uniform weights.
inline FitResult fit_reflectivity(std::span<const BouncePoint> trace, double lo, double hi) {
    std::vector<BouncePoint> window;
    for (const auto& p : trace)
        if (p.bounce >= lo && p.bounce <= hi) window.push_back(p);
    if (window.size() < 10)
        throw std::invalid_argument("fit_reflectivity: window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                    "] holds " + std::to_string(window.size()) + " points, need >= 10");
    for (const auto& p : window)
        if (!(p.intensity > 0.0))
            throw std::invalid_argument("fit_reflectivity: non-positive intensity at bounce " + std::to_string(p.bounce));

    // Offsets from the first point keep a constant trace exactly flat.
    const double x0 = window.front().bounce;
    const double y0 = std::log(window.front().intensity);
    const double n = static_cast<double>(window.size());
    double sx = 0.0, sy = 0.0;
    for (const auto& p : window) {
        sx += p.bounce - x0;
        sy += std::log(p.intensity) - y0;
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& p : window) {
        const double dx = p.bounce - x0 - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(p.intensity) - y0 - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_reflectivity: window has no bounce spread");
    const double slope = sxy / sxx;
    const double intercept = y0 + my - slope * (x0 + mx);

    FitResult fit;
    fit.r = std::exp(slope);
    if (fit.r > 1.0) throw std::domain_error("fit_reflectivity: intensity grows across the window");
    fit.i0 = std::exp(intercept);
    double ss = 0.0;
    for (const auto& p : window) {
        const double e = std::log(p.intensity) - (intercept + slope * p.bounce);
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

/// Sums adjacent column pairs. A fixed lattice row is only reached on every
/// other column, so raw per-column traces carry a mirror of each line at
/// Nyquist minus its frequency; merging pairs removes it.
inline std::vector<double> merge_column_pairs(std::span<const double> trace) {
    std::vector<double> out(trace.size() / 2);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = trace[2 * k] + trace[2 * k + 1];
    return out;
}

namespace detail {
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

/// Magnitude spectrum of a positional trace sampled every `spacing` Δ_H. The
/// mean is removed and a Hann taper applied; magnitudes are scaled so a
/// sinusoid of amplitude A peaks near A.
inline std::vector<SpectrumBin> spectrum(std::span<const double> trace, double spacing) {
    const std::size_t n = trace.size();
    if (n < 16) throw std::invalid_argument("spectrum: need at least 16 samples, got " + std::to_string(n));
    if (!(spacing > 0.0)) throw std::invalid_argument("spectrum: sample spacing must be positive");

    double mean = 0.0;
    for (double v : trace) mean += v;
    mean /= static_cast<double>(n);

    double* in = fftw_alloc_real(n);
    fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
    fftw_plan plan;
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
    }
    double window_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
        window_sum += w;
        in[i] = (trace[i] - mean) * w;
    }
    fftw_execute(plan);

    std::vector<SpectrumBin> bins(n / 2 + 1);
    const double df = 1.0 / (static_cast<double>(n) * spacing);
    for (std::size_t k = 0; k < bins.size(); ++k)
        bins[k] = {static_cast<double>(k) * df, 2.0 * std::hypot(out[k][0], out[k][1]) / window_sum};
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);
    return bins;
}

/// Indices of local maxima (strictly above the left neighbour, not below the
/// right) exceeding `threshold_fraction` of the largest value. End points are
/// never maxima.
inline std::vector<std::size_t> local_maxima(std::span<const double> values, double threshold_fraction) {
    std::vector<std::size_t> idx;
    if (values.size() < 3) return idx;
    const double top = *std::max_element(values.begin(), values.end());
    if (!(top > 0.0)) return idx;
    for (std::size_t i = 1; i + 1 < values.size(); ++i)
        if (values[i] > values[i - 1] && values[i] >= values[i + 1] && values[i] > threshold_fraction * top)
            idx.push_back(i);
    return idx;
}

/// Spectral lines above `threshold` times the largest magnitude, zero
/// frequency excluded.
inline std::vector<SpectrumBin> spectral_peaks(std::span<const SpectrumBin> bins, double threshold = kModeThreshold) {
    std::vector<SpectrumBin> peaks;
    if (bins.size() < 3) return peaks;
    std::vector<double> mags(bins.size());
    for (std::size_t k = 1; k < bins.size(); ++k) mags[k] = bins[k].magnitude;
    mags[0] = 0.0;
    for (std::size_t k : local_maxima(mags, threshold)) peaks.push_back(bins[k]);
    return peaks;
}

/// Mean spacing of the local maxima of a uniformly sampled series, each
/// maximum refined by a parabola through its three samples.
inline double oscillation_period(std::span<const std::pair<double, double>> series) {
    if (series.size() < 5) throw std::invalid_argument("oscillation_period: series too short");
    const double step = series[1].first - series[0].first;
    if (!(step > 0.0)) throw std::invalid_argument("oscillation_period: abscissae must increase");
    for (std::size_t i = 1; i < series.size(); ++i)
        if (std::abs((series[i].first - series[i - 1].first) - step) > 1e-6 * step)
            throw std::invalid_argument("oscillation_period: samples are not uniformly spaced");

    std::vector<double> peaks;
    for (std::size_t i = 1; i + 1 < series.size(); ++i) {
        const double y0 = series[i - 1].second, y1 = series[i].second, y2 = series[i + 1].second;
        if (!(y1 > y0 && y1 >= y2)) continue;
        const double curvature = y0 - 2.0 * y1 + y2;
        const double offset = curvature != 0.0 ? 0.5 * (y0 - y2) / curvature : 0.0;
        peaks.push_back(series[i].first + offset * step);
    }
    if (peaks.size() < 3)
        throw std::invalid_argument("oscillation_period: found " + std::to_string(peaks.size()) +
                                    " maxima, need at least 3");
    return (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
}

}  // namespace braggwalk
