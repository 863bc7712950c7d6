#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string_view>

#include "error.hpp"

namespace qexp {

/// Which of the two digit-generating interval maps is meant.
enum class MapKind { greedy, lazy };

constexpr std::string_view to_string(MapKind kind) noexcept {
    return kind == MapKind::greedy ? "greedy" : "lazy";
}

/// A validated double base Q = (q0, q1) with q0 + q1 >= q0 q1, together with
/// every constant the dynamics read on hot paths.
///
/// Invariants (established by the constructor, never violated afterwards):
///   0 <= ell <= lazy_switch,  greedy_switch <= r <= right,
///   greedy_switch <= lazy_switch, with equality exactly on the boundary
///   q0 + q1 == q0 q1, where also ell == 0 and r == right.
class BasePair {
public:
    BasePair(double q0, double q1) {
        if (!std::isfinite(q0) || !std::isfinite(q1)) {
            std::ostringstream os;
            os << "bases must be finite, got (" << q0 << ", " << q1 << ")";
            throw Error(ErrorKind::NonFinite, os.str());
        }
        const double sum = q0 + q1;
        const double product = q0 * q1;
        if (!(q0 > 1.0) || !(q1 > 1.0) || sum < product) {
            std::ostringstream os;
            os.precision(17);
            os << "need q0 > 1, q1 > 1 and q0 + q1 >= q0 q1, got (" << q0 << ", " << q1 << ")";
            throw Error(ErrorKind::InvalidBase, os.str());
        }
        q0_ = q0;
        q1_ = q1;
        strict_ = sum > product;
        right_ = 1.0 / (q1 - 1.0);
        greedy_switch_ = 1.0 / q1;
        if (strict_) {
            lazy_switch_ = std::max(1.0 / (q0 * (q1 - 1.0)), greedy_switch_);
            ell_ = std::clamp(q1 / (q0 * (q1 - 1.0)) - 1.0, 0.0, lazy_switch_);
            r_ = std::clamp(q0 / q1, greedy_switch_, right_);
        } else {
            // On the boundary the two switch points coincide and the
            // critical points sit on the endpoints of I_Q.
            lazy_switch_ = greedy_switch_;
            ell_ = 0.0;
            r_ = right_;
        }
    }

    double q0() const noexcept { return q0_; }
    double q1() const noexcept { return q1_; }
    /// Base attached to a digit.
    double q(int digit) const noexcept { return digit == 0 ? q0_ : q1_; }
    double qmin() const noexcept { return std::min(q0_, q1_); }
    double qmax() const noexcept { return std::max(q0_, q1_); }

    /// Left critical point q1/(q0(q1-1)) - 1.
    double ell() const noexcept { return ell_; }
    /// Right critical point q0/q1.
    double r() const noexcept { return r_; }
    /// Right endpoint 1/(q1-1) of I_Q.
    double right() const noexcept { return right_; }
    double greedy_switch() const noexcept { return greedy_switch_; }
    double lazy_switch() const noexcept { return lazy_switch_; }
    bool strict() const noexcept { return strict_; }

    /// Endpoint of the support of the invariant density that is not an
    /// endpoint of I_Q: r for the greedy map, ell for the lazy map.
    double critical_point(MapKind kind) const noexcept { return kind == MapKind::greedy ? r_ : ell_; }

    friend bool operator==(const BasePair& a, const BasePair& b) noexcept {
        return a.q0_ == b.q0_ && a.q1_ == b.q1_;
    }

private:
    double q0_ = 0;
    double q1_ = 0;
    double ell_ = 0;
    double r_ = 0;
    double right_ = 0;
    double greedy_switch_ = 0;
    double lazy_switch_ = 0;
    bool strict_ = false;
};

inline BasePair new_base(double q0, double q1) { return BasePair(q0, q1); }

/// Boundary pair (q0, q0/(q0-1)). Rounding may push the computed product a
/// hair above the sum; in that case q1 is nudged down one ulp at a time
/// until the pair is admissible.
inline BasePair boundary_base(double q0) {
    if (!(q0 > 1.0) || !std::isfinite(q0)) {
        throw Error(ErrorKind::InvalidBase, "boundary pair needs q0 > 1");
    }
    double q1 = q0 / (q0 - 1.0);
    for (int i = 0; i < 8 && q0 + q1 < q0 * q1; ++i) {
        q1 = std::nextafter(q1, 1.0);
    }
    return BasePair(q0, q1);
}

} // namespace qexp
