#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "maps.hpp"

namespace qexp {

struct SolveOptions {
    double residual_tol = 1e-10;
    int max_iterations = 200;
    // Open search box for (q0, q1).
    double q0_max = 8.0;
    double q1_max = 4.0;
};

namespace detail {

struct Residual {
    std::array<double, 2> f;
    std::array<std::array<double, 2>, 2> jac;

    double norm() const noexcept { return std::max(std::abs(f[0]), std::abs(f[1])); }
};

// f0 = pi(greedy) - q0/q1,  f1 = pi(lazy) - (q1/(q0(q1-1)) - 1)
inline Residual critical_residual(double q0, double q1, const TailedWord& greedy, const TailedWord& lazy) {
    const ExpansionValue g = expansion_value(q0, q1, greedy);
    const ExpansionValue l = expansion_value(q0, q1, lazy);
    const double m = q1 - 1.0;
    Residual out;
    out.f = {g.value - q0 / q1, l.value - (q1 / (q0 * m) - 1.0)};
    out.jac[0] = {g.d_q0 - 1.0 / q1, g.d_q1 + q0 / (q1 * q1)};
    out.jac[1] = {l.d_q0 + q1 / (q0 * q0 * m), l.d_q1 + 1.0 / (q0 * m * m)};
    return out;
}

inline bool inside_box(double q0, double q1, const SolveOptions& opt) noexcept {
    return q0 > 1.0 && q0 < opt.q0_max && q1 > 1.0 && q1 < opt.q1_max;
}

/// Damped Newton from one start; the step length is bisected until the
/// residual decreases and the iterate stays in the box.
inline std::optional<std::array<double, 2>> newton_from(double q0, double q1, const TailedWord& greedy,
                                                        const TailedWord& lazy, const SolveOptions& opt) {
    Residual res = critical_residual(q0, q1, greedy, lazy);
    for (int it = 0; it < opt.max_iterations; ++it) {
        if (res.norm() <= 1e-15) break;
        const auto& J = res.jac;
        const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
        const double scale = std::max({std::abs(J[0][0] * J[1][1]), std::abs(J[0][1] * J[1][0]), 1e-300});
        if (!std::isfinite(det) || std::abs(det) < 1e-14 * scale) return std::nullopt;
        const double dq0 = (-res.f[0] * J[1][1] + res.f[1] * J[0][1]) / det;
        const double dq1 = (-res.f[1] * J[0][0] + res.f[0] * J[1][0]) / det;

        double t = 1.0;
        bool accepted = false;
        for (int halvings = 0; halvings < 60; ++halvings, t *= 0.5) {
            const double n0 = q0 + t * dq0;
            const double n1 = q1 + t * dq1;
            if (!inside_box(n0, n1, opt)) continue;
            Residual trial = critical_residual(n0, n1, greedy, lazy);
            if (std::isfinite(trial.norm()) && trial.norm() < res.norm()) {
                q0 = n0;
                q1 = n1;
                res = trial;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    if (res.norm() <= opt.residual_tol) return std::array<double, 2>{q0, q1};
    return std::nullopt;
}

} // namespace detail

namespace detail {

struct GridOutcome {
    std::optional<std::array<double, 2>> root;
    bool saw_inadmissible = false;
};

inline bool admissible_pair(const std::array<double, 2>& q) { return q[0] + q[1] >= q[0] * q[1]; }

/// First admissible root reached from a fixed grid of starts.
inline GridOutcome solve_from_grid(const TailedWord& greedy, const TailedWord& lazy, const SolveOptions& opt) {
    static constexpr std::array<double, 9> q0_starts{2.0, 1.5, 3.0, 1.2, 2.5, 4.0, 1.05, 5.5, 7.5};
    static constexpr std::array<double, 8> q1_starts{1.5, 2.0, 1.2, 2.5, 1.05, 3.0, 1.35, 3.8};
    GridOutcome out;
    for (double s0 : q0_starts) {
        for (double s1 : q1_starts) {
            if (!inside_box(s0, s1, opt)) continue;
            const auto root = newton_from(s0, s1, greedy, lazy, opt);
            if (!root) continue;
            if (!admissible_pair(*root)) {
                out.saw_inadmissible = true;
                continue;
            }
            out.root = root;
            return out;
        }
    }
    return out;
}

inline TailedWord truncated(const TailedWord& w, std::size_t m) { return {w.word.prefix(std::min(m, w.word.size())), w.tail}; }

} // namespace detail

/// Recovers Q from prescribed expansions of its critical points: the greedy
/// target is an expansion of r_Q, the lazy target an expansion of ell_Q.
///
/// Multi-start damped Newton over the box (1, 8) x (1, 4). Long words make
/// the system too nonlinear for a cold start, so when the grid fails the
/// words are grown one digit at a time, each solve starting from the last
/// root found. Throws NoSolution when nothing converges (or the input is the
/// degenerate boundary pair r = 1^inf, ell = 0^inf, which fixes only
/// q0 + q1 = q0 q1), and InvalidBase when every root found is inadmissible.
inline BasePair solve_base(const TailedWord& greedy, const TailedWord& lazy, const SolveOptions& opt = {}) {
    const bool greedy_is_right_endpoint = greedy.tail == Tail::ones && greedy.word.all_equal_to(1);
    const bool lazy_is_zero = lazy.tail == Tail::zeros && lazy.word.all_equal_to(0);
    if (greedy_is_right_endpoint && lazy_is_zero) {
        throw Error(ErrorKind::NoSolution,
                    "r = 1^inf and ell = 0^inf only say q0 + q1 = q0 q1; the pair is under-determined");
    }

    detail::GridOutcome grid = detail::solve_from_grid(greedy, lazy, opt);
    if (grid.root) return BasePair((*grid.root)[0], (*grid.root)[1]);
    bool saw_inadmissible = grid.saw_inadmissible;

    const std::size_t len = std::max(greedy.word.size(), lazy.word.size());
    std::optional<std::array<double, 2>> guess;
    for (std::size_t m = 1; m <= len; ++m) {
        const TailedWord g = detail::truncated(greedy, m);
        const TailedWord l = detail::truncated(lazy, m);
        std::optional<std::array<double, 2>> root;
        if (guess) root = detail::newton_from((*guess)[0], (*guess)[1], g, l, opt);
        if (!root && m < len) {
            const auto cold = detail::solve_from_grid(g, l, opt);
            root = cold.root;
        }
        if (root && !detail::admissible_pair(*root)) {
            saw_inadmissible = true;
            root.reset();
        }
        if (root) guess = root;
        if (m == len && root) return BasePair((*root)[0], (*root)[1]);
    }
    if (saw_inadmissible) {
        throw Error(ErrorKind::InvalidBase, "every root of the critical-point system violates q0 + q1 >= q0 q1");
    }
    throw Error(ErrorKind::NoSolution, "Newton failed to converge from every start in the search box");
}

/// The double base whose critical points have greedy expansion 1110^inf and
/// lazy expansion 001^inf (approximately (2.1479, 1.46557)).
inline BasePair figure_one_base() {
    return solve_base({DigitWord::parse("111"), Tail::zeros}, {DigitWord::parse("00"), Tail::ones});
}

} // namespace qexp
