#pragma once

#include <braggwalk/coin.hpp>
#include <braggwalk/errors.hpp>

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace braggwalk {

/// Propagation direction of an amplitude: up-moving (a) or down-moving (b).
enum class Mode { up, down };

/// Node kinds of one lattice column, row 0 at the bottom. Coin matrices are
/// expanded once at construction.
class ColumnSpec {
public:
    explicit ColumnSpec(std::vector<NodeKind> kinds) : kinds_(std::move(kinds)) {
        if (kinds_.empty()) throw std::invalid_argument("ColumnSpec: height must be at least 1");
        t_a_.reserve(kinds_.size());
        r_b_.reserve(kinds_.size());
        r_a_.reserve(kinds_.size());
        t_b_.reserve(kinds_.size());
        for (const auto& kind : kinds_) {
            const CoinMatrix u = coin_of(kind);
            t_a_.push_back(u.t_a);
            r_b_.push_back(u.r_b);
            r_a_.push_back(u.r_a);
            t_b_.push_back(u.t_b);
        }
    }

    std::size_t height() const noexcept { return kinds_.size(); }
    const NodeKind& kind(std::size_t row) const { return kinds_.at(row); }
    std::span<const NodeKind> kinds() const noexcept { return kinds_; }

    CoinMatrix coin(std::size_t row) const {
        return CoinMatrix{t_a_.at(row), r_b_.at(row), r_a_.at(row), t_b_.at(row)};
    }

    // Coefficient planes used by the propagation kernel.
    std::span<const cplx> t_a() const noexcept { return t_a_; }
    std::span<const cplx> r_b() const noexcept { return r_b_; }
    std::span<const cplx> r_a() const noexcept { return r_a_; }
    std::span<const cplx> t_b() const noexcept { return t_b_; }

    friend bool operator==(const ColumnSpec& x, const ColumnSpec& y) { return x.kinds_ == y.kinds_; }

private:
    std::vector<NodeKind> kinds_;
    std::vector<cplx> t_a_, r_b_, r_a_, t_b_;
};

/// Amplitudes entering each node of a column: a(m) moving up, b(m) moving
/// down. Probability that has left through the top or bottom edge of the
/// lattice is kept in the leak tallies, so the total is conserved.
class WalkState {
public:
    struct LeakSample {
        double top = 0.0;
        double bottom = 0.0;
        friend bool operator==(const LeakSample&, const LeakSample&) = default;
    };

    WalkState() = default;
    explicit WalkState(std::size_t height) : a_(height), b_(height) {
        if (height == 0) throw std::invalid_argument("WalkState: height must be at least 1");
    }

    /// Point excitation of one mode.
    static WalkState point(std::size_t height, std::size_t row, bool up, cplx amplitude = 1.0) {
        WalkState s(height);
        if (row >= height) throw std::out_of_range("WalkState::point: row outside lattice");
        (up ? s.a_ : s.b_)[row] = amplitude;
        return s;
    }

    std::size_t height() const noexcept { return a_.size(); }

    std::span<cplx> up() noexcept { return a_; }
    std::span<const cplx> up() const noexcept { return a_; }
    std::span<cplx> down() noexcept { return b_; }
    std::span<const cplx> down() const noexcept { return b_; }

    double leak_top() const noexcept { return leak_top_; }
    double leak_bottom() const noexcept { return leak_bottom_; }

    /// Sum of |a|^2 + |b|^2 over the column.
    double norm() const noexcept {
        double total = 0.0;
        for (std::size_t m = 0; m < a_.size(); ++m) total += std::norm(a_[m]) + std::norm(b_[m]);
        return total;
    }

    double total_probability() const noexcept { return norm() + leak_top_ + leak_bottom_; }

    /// Per-column leak amounts are appended to leak_history() while enabled.
    void record_leaks(bool on) { record_history_ = on; }
    const std::vector<LeakSample>& leak_history() const noexcept { return history_; }

    friend bool operator==(const WalkState&, const WalkState&) = default;

private:
    friend class Propagator;
    friend WalkState restore_walk_state(std::vector<cplx>, std::vector<cplx>, double, double);

    std::vector<cplx> a_;
    std::vector<cplx> b_;
    double leak_top_ = 0.0;
    double leak_bottom_ = 0.0;
    bool record_history_ = false;
    std::vector<LeakSample> history_;
};

/// Rebuilds a state from stored amplitudes and tallies (checkpoint loading).
inline WalkState restore_walk_state(std::vector<cplx> up, std::vector<cplx> down, double leak_top,
                                    double leak_bottom) {
    if (up.size() != down.size() || up.empty())
        throw std::invalid_argument("restore_walk_state: amplitude planes must be non-empty and equal length");
    if (!(leak_top >= 0.0) || !(leak_bottom >= 0.0))
        throw std::invalid_argument("restore_walk_state: leak tallies must be non-negative");
    WalkState s;
    s.a_ = std::move(up);
    s.b_ = std::move(down);
    s.leak_top_ = leak_top;
    s.leak_bottom_ = leak_bottom;
    return s;
}

namespace detail {

// Written out so the kernel avoids the NaN-recovery path of std::complex
// multiplication and vectorizes.
inline cplx mul_add(cplx u, cplx x, cplx v, cplx y) {
    return {u.real() * x.real() - u.imag() * x.imag() + v.real() * y.real() - v.imag() * y.imag(),
            u.real() * x.imag() + u.imag() * x.real() + v.real() * y.imag() + v.imag() * y.real()};
}

}  // namespace detail

/// In-place column stepper. Owns the scratch planes so repeated steps do not
/// allocate; outputs are written to scratch and swapped in, which keeps reads
/// of column c separate from writes of column c+1.
class Propagator {
public:
    struct StepResult {
        double leaked_top = 0.0;
        double leaked_bottom = 0.0;
        double remaining = 0.0;  ///< norm left in the lattice after the step
    };

    StepResult step(WalkState& state, const ColumnSpec& spec) {
        const std::size_t h = state.height();
        if (spec.height() != h)
            throw std::invalid_argument("apply_column: state height " + std::to_string(h) +
                                        " != column height " + std::to_string(spec.height()));
        next_a_.resize(h);
        next_b_.resize(h);

        const cplx* a = state.a_.data();
        const cplx* b = state.b_.data();
        const cplx* ta = spec.t_a().data();
        const cplx* rb = spec.r_b().data();
        const cplx* ra = spec.r_a().data();
        const cplx* tb = spec.t_b().data();
        cplx* na = next_a_.data();
        cplx* nb = next_b_.data();

        // Node m sends its up output to a(m+1) and its down output to b(m-1).
        const cplx top_out = detail::mul_add(ta[h - 1], a[h - 1], rb[h - 1], b[h - 1]);
        const cplx bottom_out = detail::mul_add(ra[0], a[0], tb[0], b[0]);
        na[0] = 0.0;
        nb[h - 1] = 0.0;
        double kept = 0.0;
        for (std::size_t m = 0; m + 1 < h; ++m) {
            const cplx up = detail::mul_add(ta[m], a[m], rb[m], b[m]);
            const cplx down = detail::mul_add(ra[m + 1], a[m + 1], tb[m + 1], b[m + 1]);
            na[m + 1] = up;
            nb[m] = down;
            kept += up.real() * up.real() + up.imag() * up.imag() + down.real() * down.real() +
                    down.imag() * down.imag();
        }

        StepResult r;
        r.leaked_top = std::norm(top_out);
        r.leaked_bottom = std::norm(bottom_out);
        r.remaining = kept;
        if (!std::isfinite(kept) || !std::isfinite(r.leaked_top) || !std::isfinite(r.leaked_bottom))
            throw NumericError("apply_column: non-finite amplitude encountered");

        state.a_.swap(next_a_);
        state.b_.swap(next_b_);
        state.leak_top_ += r.leaked_top;
        state.leak_bottom_ += r.leaked_bottom;
        if (state.record_history_) state.history_.push_back({r.leaked_top, r.leaked_bottom});
        return r;
    }

private:
    std::vector<cplx> next_a_;
    std::vector<cplx> next_b_;
};

/// One lattice column applied to a copy of `state`.
inline WalkState apply_column(const WalkState& state, const ColumnSpec& spec) {
    WalkState next = state;
    Propagator p;
    p.step(next, spec);
    return next;
}

}  // namespace braggwalk
