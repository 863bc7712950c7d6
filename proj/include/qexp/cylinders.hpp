#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "maps.hpp"

namespace qexp {

/// Real interval with explicit endpoint closure. Empty when lo > hi or when
/// lo == hi and the point is not included.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_closed = true;
    bool hi_closed = false;

    static Interval empty_interval() { return {0.0, 0.0, false, false}; }

    bool empty() const noexcept { return lo > hi || (lo == hi && !(lo_closed && hi_closed)); }
    double length() const noexcept { return empty() ? 0.0 : hi - lo; }

    bool contains(double x) const noexcept {
        if (empty()) return false;
        const bool above = lo_closed ? x >= lo : x > lo;
        const bool below = hi_closed ? x <= hi : x < hi;
        return above && below;
    }
};

inline Interval intersect(const Interval& a, const Interval& b) {
    if (a.empty() || b.empty()) return Interval::empty_interval();
    Interval out;
    if (a.lo > b.lo) {
        out.lo = a.lo;
        out.lo_closed = a.lo_closed;
    } else if (b.lo > a.lo) {
        out.lo = b.lo;
        out.lo_closed = b.lo_closed;
    } else {
        out.lo = a.lo;
        out.lo_closed = a.lo_closed && b.lo_closed;
    }
    if (a.hi < b.hi) {
        out.hi = a.hi;
        out.hi_closed = a.hi_closed;
    } else if (b.hi < a.hi) {
        out.hi = b.hi;
        out.hi_closed = b.hi_closed;
    } else {
        out.hi = a.hi;
        out.hi_closed = a.hi_closed && b.hi_closed;
    }
    return out.empty() ? Interval::empty_interval() : out;
}

/// Branch domains of the chosen map: greedy I_0 = [0, 1/q1), I_1 = [1/q1, R];
/// lazy [0, s], (s, R] with s = 1/(q0(q1-1)).
inline Interval branch_domain(const BasePair& Q, MapKind kind, int digit) {
    if (kind == MapKind::greedy) {
        return digit == 0 ? Interval{0.0, Q.greedy_switch(), true, false}
                          : Interval{Q.greedy_switch(), Q.right(), true, true};
    }
    return digit == 0 ? Interval{0.0, Q.lazy_switch(), true, true} : Interval{Q.lazy_switch(), Q.right(), false, true};
}

inline Interval full_domain(const BasePair& Q) { return {0.0, Q.right(), true, true}; }

namespace detail {

inline Interval apply_branch(const BasePair& Q, int digit, const Interval& in) {
    // Branch images of switch points land on 0 or R up to rounding; snap them.
    const double tol = 1e-12 * std::max(1.0, Q.right());
    auto f = [&](double x) {
        const double y = digit == 0 ? Q.q0() * x : Q.q1() * x - 1.0;
        if (y <= tol) return 0.0;
        if (y >= Q.right() - tol) return Q.right();
        return y;
    };
    return {f(in.lo), f(in.hi), in.lo_closed, in.hi_closed};
}

inline bool negligible(const BasePair& Q, const Interval& iv) {
    return iv.empty() || iv.length() <= 1e-12 * std::max(1.0, Q.right());
}

} // namespace detail

/// A cylinder: the points whose itinerary under the chosen map starts with
/// `word` (domain), the image of that set under the word's branch
/// composition (image), and the slope A_w of that composition (weight).
struct CylinderInterval {
    DigitWord word;
    Interval domain;
    Interval image;
    double weight = 1.0;

    /// Forward branch composition G_w restricted to the domain.
    double forward(double x) const noexcept { return image.lo + weight * (x - domain.lo); }
    /// Inverse branch composition G_w^{-1}: image -> domain.
    double inverse(double y) const noexcept { return domain.lo + (y - image.lo) / weight; }

    /// The child cylinder for the next digit, or an empty-domain cylinder.
    CylinderInterval child(const BasePair& Q, MapKind kind, int digit) const {
        const Interval part = intersect(branch_domain(Q, kind, digit), image);
        CylinderInterval out;
        out.word = word;
        out.word.push_back(digit);
        out.weight = weight * Q.q(digit);
        if (detail::negligible(Q, part)) {
            out.domain = Interval::empty_interval();
            out.image = Interval::empty_interval();
            return out;
        }
        // Shared endpoints reuse the parent's stored values so that the
        // children tile the parent exactly.
        out.domain.lo = part.lo == image.lo ? domain.lo : inverse(part.lo);
        out.domain.hi = part.hi == image.hi ? domain.hi : inverse(part.hi);
        out.domain.lo_closed = part.lo_closed;
        out.domain.hi_closed = part.hi_closed;
        out.image = detail::apply_branch(Q, digit, part);
        return out;
    }
};

/// The level-0 cylinder: the empty word, all of I_Q, weight 1.
inline CylinderInterval root_cylinder(const BasePair& Q) { return {DigitWord{}, full_domain(Q), full_domain(Q), 1.0}; }

/// All words of length n with a non-degenerate cylinder, sorted by left
/// endpoint (equivalently, lexicographically).
inline std::vector<CylinderInterval> level_partition(const BasePair& Q, std::size_t n, MapKind kind = MapKind::greedy) {
    if (n > 20) throw Error(ErrorKind::BranchOverflow, "level_partition supports n <= 20");
    std::vector<CylinderInterval> level{root_cylinder(Q)};
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<CylinderInterval> next;
        next.reserve(level.size() * 2);
        for (const auto& c : level) {
            for (int d = 0; d < 2; ++d) {
                CylinderInterval ch = c.child(Q, kind, d);
                if (!ch.domain.empty()) next.push_back(std::move(ch));
            }
        }
        level = std::move(next);
    }
    return level;
}

/// J_w by the forward recursion J_{ud} = T_d(D_d cap J_u) from J = I_Q.
inline Interval image_interval(const BasePair& Q, const DigitWord& w, MapKind kind = MapKind::greedy) {
    Interval image = full_domain(Q);
    for (std::size_t i = 0; i < w.size(); ++i) {
        const Interval part = intersect(branch_domain(Q, kind, w[i]), image);
        if (detail::negligible(Q, part)) return Interval::empty_interval();
        image = detail::apply_branch(Q, w[i], part);
    }
    return image;
}

enum class ImageShape { empty, prefix, full };

/// Classifies a greedy image as empty, [0, xi) with xi <= r_Q, or all of I_Q.
inline ImageShape classify_image(const BasePair& Q, const Interval& image) {
    if (image.empty()) return ImageShape::empty;
    if (image.lo == 0.0 && image.lo_closed && image.hi == Q.right() && image.hi_closed) return ImageShape::full;
    return ImageShape::prefix;
}

/// Least m <= m_max with J_{u 0^m} = [0, r_Q), computed from the closed form
/// J_{u0^m} = [0, min(r_Q, q0^m xi_u)).
inline std::size_t full_return(const BasePair& Q, const DigitWord& u, std::size_t m_max) {
    const Interval image = image_interval(Q, u);
    if (image.empty()) throw Error(ErrorKind::NotFound, "J_u is empty for u = " + u.str());
    if (classify_image(Q, image) == ImageShape::full) {
        if (m_max < 1) throw Error(ErrorKind::NotFound, "m_max = 0 but J_u = I_Q needs m = 1");
        return 1;
    }
    const double target = Q.r() * (1.0 - 1e-12);
    double xi = image.hi;
    for (std::size_t m = 0; m <= m_max; ++m) {
        if (xi >= target) return m;
        xi *= Q.q0();
    }
    throw Error(ErrorKind::NotFound, "no full return within m_max for u = " + u.str());
}

} // namespace qexp
