#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "cylinders.hpp"
#include "stepfn.hpp"

namespace qexp {

/// Frobenius-Perron operator of the greedy or lazy map:
///   greedy  Gf(x) = f(x/q0)/q0 * 1_[0,r)(x)   + f((x+1)/q1)/q1
///   lazy    Lf(x) = f(x/q0)/q0                + f((x+1)/q1)/q1 * 1_(ell,R](x)
struct FPOperator {
    BasePair base;
    MapKind kind;
};

namespace detail {

/// Sorts candidate breakpoints and removes those that would collapse in
/// canonical form, so that every returned piece has a well-defined interior.
inline std::vector<double> settle_breakpoints(std::vector<double> cand, double right) {
    std::sort(cand.begin(), cand.end());
    std::vector<double> out;
    out.reserve(cand.size());
    const double tol = StepFunction::merge_tolerance;
    for (double b : cand) {
        if (b < tol || right - b < tol) continue;
        if (!out.empty() && b - out.back() < tol) continue;
        out.push_back(b);
    }
    return out;
}

/// Builds a step function whose breakpoints are (a superset of) `cand` by
/// sampling `value_at` at piece midpoints.
template <typename ValueAt>
StepFunction sample_on_breakpoints(std::vector<double> cand, double right, ValueAt&& value_at) {
    std::vector<double> breaks = settle_breakpoints(std::move(cand), right);
    std::vector<double> values;
    values.reserve(breaks.size() + 1);
    double left = 0.0;
    for (std::size_t i = 0; i <= breaks.size(); ++i) {
        const double hi = i < breaks.size() ? breaks[i] : right;
        values.push_back(value_at(0.5 * (left + hi)));
        left = hi;
    }
    return StepFunction(right, std::move(breaks), std::move(values));
}

} // namespace detail

/// Exact pushforward of a step density; new breakpoints are the branch
/// images of the old ones plus the sharp support edge (r_Q or ell_Q).
inline StepFunction apply(const FPOperator& op, const StepFunction& f) {
    const BasePair& Q = op.base;
    detail::require_same_domain(f, StepFunction::constant(Q.right(), 0.0));
    const double R = Q.right();
    const double q0 = Q.q0();
    const double q1 = Q.q1();
    const bool greedy = op.kind == MapKind::greedy;
    const double edge = greedy ? Q.r() : Q.ell();

    std::vector<double> cand;
    cand.reserve(2 * f.breakpoints().size() + 1);
    cand.push_back(edge);
    for (double b : f.breakpoints()) {
        const double left_image = q0 * b;
        const double right_image = q1 * b - 1.0;
        if (left_image < (greedy ? edge : R)) cand.push_back(left_image);
        if (right_image > (greedy ? 0.0 : edge)) cand.push_back(right_image);
    }
    const double fr = f.domain_right();
    auto value_at = [&](double x) {
        double v = 0.0;
        if (!greedy || x < edge) v += f.values()[f.piece_index(std::min(x / q0, fr))] / q0;
        if (greedy || x > edge) v += f.values()[f.piece_index(std::min((x + 1.0) / q1, fr))] / q1;
        return v;
    };
    return detail::sample_on_breakpoints(std::move(cand), R, value_at);
}

inline StepFunction apply_n(const FPOperator& op, StepFunction f, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) f = apply(op, f);
    return f;
}

/// Region where the invariant density of the operator's map vanishes.
inline double mass_outside_support(const FPOperator& op, const StepFunction& f) {
    return op.kind == MapKind::greedy ? mass_on(f, op.base.r(), op.base.right()) : mass_on(f, 0.0, op.base.ell());
}

struct IterateRecord {
    std::size_t index;
    double l1_increment;
    std::size_t breakpoint_count;
    double mass_outside_support;
    double integral;
};

struct IterationTrace {
    std::vector<IterateRecord> records;
    StepFunction last;
};

struct IterateOptions {
    std::size_t breakpoint_cap = 20000;
    bool stop_early = true;
    double stop_increment = 1e-12;
    std::size_t stop_after = 3;
};

/// Iterates the operator n times (or until the increment stays below
/// `stop_increment` for `stop_after` consecutive steps).
inline IterationTrace iterate(const FPOperator& op, const StepFunction& f0, std::size_t n,
                              const IterateOptions& opt = {}) {
    IterationTrace trace{{}, f0};
    trace.records.reserve(n);
    std::size_t quiet = 0;
    for (std::size_t k = 1; k <= n; ++k) {
        StepFunction next = apply(op, trace.last);
        if (next.breakpoints().size() > opt.breakpoint_cap) {
            throw Error(ErrorKind::BreakpointOverflow, "iterate " + std::to_string(k) + " has " +
                                                           std::to_string(next.breakpoints().size()) +
                                                           " breakpoints, cap " + std::to_string(opt.breakpoint_cap));
        }
        const double inc = l1_distance(next, trace.last);
        trace.records.push_back({k, inc, next.breakpoints().size(), mass_outside_support(op, next), integrate(next)});
        trace.last = std::move(next);
        quiet = inc < opt.stop_increment ? quiet + 1 : 0;
        if (opt.stop_early && quiet >= opt.stop_after) break;
    }
    return trace;
}

/// L1 norm of (apply(f) - f).
inline double residual(const FPOperator& op, const StepFunction& f) { return l1_distance(apply(op, f), f); }

/// Direct N-fold formula sum_w 1_{J_w}(y) f(G_w^{-1} y) / A_w over the
/// level-N cylinders of the operator's map.
inline StepFunction cylinder_power(const FPOperator& op, const StepFunction& f, std::size_t N) {
    const BasePair& Q = op.base;
    const auto cylinders = level_partition(Q, N, op.kind);
    std::vector<double> cand;
    for (const auto& c : cylinders) {
        if (c.image.empty()) continue;
        cand.push_back(c.image.lo);
        cand.push_back(c.image.hi);
        for (double b : f.breakpoints()) {
            if (b > c.domain.lo && b < c.domain.hi) cand.push_back(c.forward(b));
        }
    }
    const double fr = f.domain_right();
    auto value_at = [&](double y) {
        double v = 0.0;
        for (const auto& c : cylinders) {
            if (!c.image.contains(y)) continue;
            v += f.values()[f.piece_index(std::clamp(c.inverse(y), 0.0, fr))] / c.weight;
        }
        return v;
    };
    return detail::sample_on_breakpoints(std::move(cand), Q.right(), value_at);
}

/// L1 gap between N applications of the operator and the cylinder sum.
inline double power_expansion_check(const FPOperator& op, const StepFunction& f, std::size_t N) {
    if (N > 10) throw Error(ErrorKind::BranchOverflow, "power_expansion_check supports N <= 10");
    return l1_distance(apply_n(op, f, N), cylinder_power(op, f, N));
}

} // namespace qexp
