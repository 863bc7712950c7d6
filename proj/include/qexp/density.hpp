#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "maps.hpp"
#include "stepfn.hpp"

namespace qexp {

/// Digits of a critical expansion with partial sums s(0) = 0, s(n) = d_1 + ... + d_n.
struct DigitSumSeq {
    DigitWord digits;
    std::vector<int> partial_sums;
};

inline DigitSumSeq digit_sums(const DigitWord& digits) {
    DigitSumSeq out{digits, {0}};
    out.partial_sums.reserve(digits.size() + 1);
    for (std::size_t i = 0; i < digits.size(); ++i) out.partial_sums.push_back(out.partial_sums.back() + digits[i]);
    return out;
}

/// Orbit of r_Q under G (greedy) or of ell_Q under L (lazy).
struct CriticalOrbit {
    OrbitRecord orbit;
    DigitSumSeq sums;
    /// First index n with x_n on a fixed point (0 or R) of the map, if the
    /// orbit reaches one within the computed depth.
    std::optional<std::size_t> constant_from;
};

/// Orbit points within this distance of 0, R or the map's switch point are
/// snapped onto it.
inline constexpr double kFixedPointTolerance = 1e-12;

/// Critical orbits of structured bases pass exactly through 0, R or the
/// switch point (the lazy orbit of 001^inf visits the lazy switch). Rounding
/// puts the computed point on either side, and past a switch the wrong
/// branch is taken, so such points are snapped.
inline CriticalOrbit critical_orbit(const BasePair& Q, MapKind kind, std::size_t N) {
    const double R = Q.right();
    const double sw = kind == MapKind::greedy ? Q.greedy_switch() : Q.lazy_switch();
    const double sw_tol = kFixedPointTolerance * std::max(1.0, R);
    auto snap = [&](double x) {
        if (std::abs(x) <= kFixedPointTolerance) return 0.0;
        if (std::abs(x - R) <= kFixedPointTolerance) return R;
        if (std::abs(x - sw) <= sw_tol) return sw;
        return x;
    };
    CriticalOrbit out{{Q, Q.critical_point(kind), {}, {}, kind}, {}, std::nullopt};
    double x = snap(Q.critical_point(kind));
    out.orbit.points.reserve(N + 1);
    out.orbit.points.push_back(x);
    for (std::size_t n = 0; n < N; ++n) {
        if (!out.constant_from && (x == 0.0 || x == R)) out.constant_from = n;
        const Step s = step(Q, x, kind);
        out.orbit.digits.push_back(s.digit);
        x = snap(s.value);
        out.orbit.points.push_back(x);
    }
    if (!out.constant_from && (x == 0.0 || x == R)) out.constant_from = N;
    out.sums = digit_sums(out.orbit.digits);
    return out;
}

/// Unnormalized jump function and a bound on the L1 norm of its truncated tail.
struct JumpFunction {
    StepFunction h;
    double tail_bound;
    CriticalOrbit orbit;
};

/// L1 bound R qmin^-N / (1 - 1/qmin) on the terms n >= N of the series.
inline double truncation_tail_bound(const BasePair& Q, std::size_t N) {
    const double inv = 1.0 / Q.qmin();
    return Q.right() * std::pow(inv, static_cast<double>(N)) / (1.0 - inv);
}

/// Jump function
///   greedy  sum_n 1_[0, G^n r_Q)     / (q1^s(n) q0^(n-s(n)))
///   lazy    sum_n 1_(L^n ell_Q, R]   / (q0^(n-t(n)) q1^t(n))
/// truncated after N terms, or summed in closed form once the critical orbit
/// sits on a fixed point of the map.
inline JumpFunction jump_function(const BasePair& Q, MapKind kind, std::size_t N) {
    if (N == 0) throw Error(ErrorKind::OutOfDomain, "jump function needs N >= 1");
    CriticalOrbit co = critical_orbit(Q, kind, N);
    const double R = Q.right();
    const auto& pts = co.orbit.points;

    const std::size_t terms = co.constant_from.value_or(N);
    std::vector<std::pair<double, double>> jumps;  // (orbit point, weight)
    jumps.reserve(terms + 1);
    double weight = 1.0;
    for (std::size_t n = 0; n < terms; ++n) {
        if (n > 0) weight /= Q.q(co.orbit.digits[n - 1]);
        jumps.emplace_back(pts[n], weight);
    }
    double tail_bound = 0.0;
    if (co.constant_from) {
        if (terms > 0) weight /= Q.q(co.orbit.digits[terms - 1]);
        const double xk = pts[terms];
        // Geometric tail of a constant orbit; at the other fixed point every
        // indicator is empty.
        if (kind == MapKind::greedy && xk == R) jumps.emplace_back(R, weight * Q.q1() / (Q.q1() - 1.0));
        if (kind == MapKind::lazy && xk == 0.0) jumps.emplace_back(0.0, weight * Q.q0() / (Q.q0() - 1.0));
    } else {
        tail_bound = truncation_tail_bound(Q, N);
    }

    std::sort(jumps.begin(), jumps.end());
    std::vector<double> breaks;
    std::vector<double> values;
    if (kind == MapKind::greedy) {
        // Value on [b_i, b_{i+1}) = sum of weights with x_n >= b_{i+1}.
        for (const auto& [x, w] : jumps) {
            if (x > 0.0 && x < R && (breaks.empty() || breaks.back() != x)) breaks.push_back(x);
        }
        values.assign(breaks.size() + 1, 0.0);
        for (const auto& [x, w] : jumps) {
            if (x <= 0.0) continue;
            // Pieces entirely left of x: all i with piece_right(i) <= x.
            const auto idx = static_cast<std::size_t>(std::upper_bound(breaks.begin(), breaks.end(), x) - breaks.begin());
            const std::size_t count = x >= R ? values.size() : idx;
            for (std::size_t i = 0; i < count; ++i) values[i] += w;
        }
    } else {
        for (const auto& [x, w] : jumps) {
            if (x > 0.0 && x < R && (breaks.empty() || breaks.back() != x)) breaks.push_back(x);
        }
        values.assign(breaks.size() + 1, 0.0);
        for (const auto& [x, w] : jumps) {
            if (x >= R) continue;
            // Pieces entirely right of x: all i with piece_left(i) >= x.
            const std::size_t first =
                x <= 0.0 ? 0
                         : static_cast<std::size_t>(std::lower_bound(breaks.begin(), breaks.end(), x) - breaks.begin()) + 1;
            for (std::size_t i = first; i < values.size(); ++i) values[i] += w;
        }
    }
    return {StepFunction(R, std::move(breaks), std::move(values)), tail_bound, std::move(co)};
}

/// Normalized invariant densities of both maps.
struct DensityPair {
    BasePair base;
    StepFunction h_greedy;
    StepFunction h_lazy;
    std::size_t truncation_N;
    double tail_bound_greedy;
    double tail_bound_lazy;
    /// max of the two normalized tail bounds
    double tail_bound_l1;

    const StepFunction& density(MapKind kind) const noexcept { return kind == MapKind::greedy ? h_greedy : h_lazy; }
};

inline constexpr std::size_t kDefaultTruncation = 64;

/// Normalized invariant density of one map plus its L1 tail bound after
/// normalization (tail / (integral - tail)).
inline std::pair<StepFunction, double> invariant_density(const BasePair& Q, MapKind kind,
                                                         std::size_t N = kDefaultTruncation) {
    JumpFunction jf = jump_function(Q, kind, N);
    const double total = integrate(jf.h);
    const double bound = jf.tail_bound == 0.0 ? 0.0 : jf.tail_bound / std::max(total - jf.tail_bound, 1e-300);
    return {normalize(jf.h), bound};
}

inline DensityPair invariant_densities(const BasePair& Q, std::size_t N = kDefaultTruncation) {
    auto [hg, bg] = invariant_density(Q, MapKind::greedy, N);
    auto [hl, bl] = invariant_density(Q, MapKind::lazy, N);
    return {Q, std::move(hg), std::move(hl), N, bg, bl, std::max(bg, bl)};
}

/// Mean of the invariant measure, i.e. the integral of x h(x).
inline double density_mean(const DensityPair& d, MapKind kind) { return first_moment(d.density(kind)); }

} // namespace qexp
