#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cylinders.hpp"
#include "density.hpp"
#include "ergodic.hpp"
#include "solve.hpp"
#include "transfer.hpp"

namespace qexp {

enum class Profile { desk, ci };

struct VerifyOptions {
    Profile profile = Profile::desk;
    std::uint64_t seed = 20240601;
};

struct CriterionResult {
    int id;
    std::string name;
    bool passed;
    std::string detail;
    double seconds;
    /// Wall-clock budget; 0 when the criterion has none.
    double budget_seconds;
};

/// Strict base drawn from the seeded stream: q0 in (1.1, 4), q1 strictly
/// between 1 and the boundary value q0/(q0-1), kept 5% away from both ends.
inline BasePair seeded_strict_base(std::uint64_t seed, std::uint64_t index) {
    SampleRng rng(seed ^ 0x5eedba5eULL, index);
    const double q0 = 1.1 + 2.9 * rng.uniform();
    const double top = q0 / (q0 - 1.0);
    const double q1 = 1.0 + (0.05 + 0.9 * rng.uniform()) * (top - 1.0);
    return BasePair(q0, q1);
}

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

/// Orbit length for the Birkhoff criterion.
inline std::size_t birkhoff_length(Profile p) { return p == Profile::desk ? 100000 : 10000; }

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

inline Check figure_one() {
    Check c;
    const BasePair Q = figure_one_base();
    const auto [h, bound] = invariant_density(Q, MapKind::greedy);
    const double want_v[] = {0.8369, 0.6554, 0.3896};
    const double want_b[] = {0.682328, 1.1479, 1.465573};
    std::size_t support = 0;
    for (double v : h.values()) support += v != 0.0;
    c.require(support == 3 && h.piece_count() == 4, "expected 3 support pieces, got " + std::to_string(support));
    if (!c.ok) return c;
    double dv = 0.0;
    double db = 0.0;
    for (int i = 0; i < 3; ++i) {
        dv = std::max(dv, std::abs(h.values()[i] - want_v[i]));
        db = std::max(db, std::abs(h.breakpoints()[i] - want_b[i]));
    }
    c.require(h.values()[3] == 0.0, "density nonzero past r_Q");
    c.require(dv <= 5e-4, "value error " + fmt(dv));
    c.require(db <= 5e-6, "breakpoint error " + fmt(db));
    if (c.ok) c.detail = "max value error " + fmt(dv) + ", max breakpoint error " + fmt(db);
    return c;
}

inline Check boundary_family() {
    Check c;
    double worst = 0.0;
    for (double q0 : {1.5, 2.0, 2.5, 3.0, 4.0}) {
        const BasePair Q = boundary_base(q0);
        const DensityPair d = invariant_densities(Q);
        const double level = Q.q1() - 1.0;
        for (MapKind kind : {MapKind::greedy, MapKind::lazy}) {
            const StepFunction& h = d.density(kind);
            c.require(h.piece_count() == 1, "density not constant at q0 = " + fmt(q0));
            for (double v : h.values()) worst = std::max(worst, std::abs(v - level));
            const FPOperator op{Q, kind};
            const auto trace = iterate(op, StepFunction::constant(Q.right(), 1.0 / Q.right()), 1);
            c.require(trace.records[0].l1_increment == 0.0,
                      "uniform moved by " + fmt(trace.records[0].l1_increment) + " at q0 = " + fmt(q0));
        }
    }
    c.require(worst <= 1e-9, "constant off by " + fmt(worst));
    if (c.ok) c.detail = "max deviation from q1-1: " + fmt(worst);
    return c;
}

inline Check fixed_point_identity(std::uint64_t seed) {
    Check c;
    double worst_ratio = 0.0;
    for (std::uint64_t i = 0; i < 20; ++i) {
        const BasePair Q = seeded_strict_base(seed, i);
        for (MapKind kind : {MapKind::greedy, MapKind::lazy}) {
            const JumpFunction jf = jump_function(Q, kind, kDefaultTruncation);
            const double res = residual(FPOperator{Q, kind}, jf.h);
            const double allowed = 2.0 * jf.tail_bound + 1e-9;
            worst_ratio = std::max(worst_ratio, res / allowed);
            c.require(res <= allowed, "residual " + fmt(res) + " > " + fmt(allowed) + " at base " + std::to_string(i));
        }
    }
    if (c.ok) c.detail = "max residual / allowance " + fmt(worst_ratio);
    return c;
}

inline Check transfer_convergence() {
    Check c;
    const BasePair Q = figure_one_base();
    const auto [h, bound] = invariant_density(Q, MapKind::greedy);
    IterateOptions opt;
    opt.stop_early = false;
    const auto trace = iterate(FPOperator{Q, MapKind::greedy}, StepFunction::constant(Q.right(), 1.0 / Q.right()), 60, opt);
    const double dist = l1_distance(trace.last, h);
    const double mass = trace.records.back().mass_outside_support;
    // Eventually monotone: non-increasing from some index in the first half on.
    const auto& rs = trace.records;
    std::size_t start = rs.size();
    while (start > 0 && (start == rs.size() || rs[start - 1].l1_increment >= rs[start].l1_increment)) --start;
    c.require(dist <= 1e-3, "L1 distance " + fmt(dist));
    c.require(start <= 30, "increments not monotone after index " + std::to_string(start + 1));
    c.require(mass < 1e-6, "mass on [r_Q, right] " + fmt(mass));
    if (c.ok) {
        c.detail = "L1 " + fmt(dist) + ", monotone from n=" + std::to_string(start + 1) + ", outside mass " + fmt(mass);
    }
    return c;
}

inline bool close(double a, double b) { return std::abs(a - b) <= 1e-12; }

inline Check partition_structure(std::uint64_t seed) {
    Check c;
    std::size_t words_checked = 0;
    for (std::uint64_t i = 0; i < 10 && c.ok; ++i) {
        const BasePair Q = seeded_strict_base(seed + 1, i);
        const double R = Q.right();
        for (std::size_t n = 1; n <= 12 && c.ok; ++n) {
            const auto level = level_partition(Q, n);
            double total = 0.0;
            double overlap = 0.0;
            for (std::size_t k = 0; k < level.size(); ++k) {
                total += level[k].domain.length();
                if (k + 1 < level.size()) overlap = std::max(overlap, level[k].domain.hi - level[k + 1].domain.lo);
                const Interval& J = level[k].image;
                const bool ones = level[k].word.all_equal_to(1);
                const ImageShape shape = classify_image(Q, J);
                if (ones) {
                    c.require(shape == ImageShape::full, "J_" + level[k].word.str() + " is not I_Q");
                } else {
                    c.require(shape == ImageShape::prefix && J.lo == 0.0 && !J.hi_closed && J.hi < R,
                              "J_" + level[k].word.str() + " is not [0, xi)");
                }
            }
            c.require(overlap <= 0.0, "overlapping cylinders at level " + std::to_string(n));
            c.require(std::abs(total - R) <= 1e-9, "level " + std::to_string(n) + " covers " + fmt(total));
        }

        // The level-2 intervals written out in closed form.
        const auto l2 = level_partition(Q, 2);
        const double q0 = Q.q0();
        const double q1 = Q.q1();
        const double dom[4][2] = {{0.0, 1.0 / (q0 * q1)},
                                  {1.0 / (q0 * q1), 1.0 / q1},
                                  {1.0 / q1, 1.0 / q1 + 1.0 / (q1 * q1)},
                                  {1.0 / q1 + 1.0 / (q1 * q1), R}};
        const double img[4] = {Q.r(), q0 - 1.0, Q.r(), R};
        c.require(l2.size() == 4, "level 2 has " + std::to_string(l2.size()) + " cylinders");
        for (std::size_t k = 0; k < 4 && c.ok; ++k) {
            c.require(close(l2[k].domain.lo, dom[k][0]) && close(l2[k].domain.hi, dom[k][1]) &&
                          l2[k].image.lo == 0.0 && close(l2[k].image.hi, img[k]),
                      "level-2 interval mismatch for " + l2[k].word.str());
        }

        // full_return against the least m whose composed image is [0, r_Q).
        SampleRng rng(seed + 2, i);
        std::size_t tested = 0;
        while (tested < 10 && c.ok) {
            DigitWord u;
            const std::size_t len = 1 + rng.next_u64() % 10;
            for (std::size_t k = 0; k < len; ++k) u.push_back(static_cast<int>(rng.next_u64() & 1));
            if (image_interval(Q, u).empty()) continue;
            ++tested;
            const std::size_t m = full_return(Q, u, 200);
            std::size_t brute = 0;
            DigitWord w = u;
            while (true) {
                const Interval J = image_interval(Q, w);
                if (J.lo == 0.0 && !J.hi_closed && std::abs(J.hi - Q.r()) <= 1e-12 * std::max(1.0, R)) break;
                w.push_back(0);
                ++brute;
            }
            c.require(m == brute, "full_return(" + u.str() + ") = " + std::to_string(m) + ", composition gives " +
                                      std::to_string(brute));
        }
        words_checked += tested;
    }
    if (c.ok) c.detail = "10 bases, levels 1..12, " + std::to_string(words_checked) + " full-return words";
    return c;
}

inline Check birkhoff_agreement(std::uint64_t seed, Profile profile) {
    Check c;
    const BasePair Q = figure_one_base();
    const DensityPair d = invariant_densities(Q);
    const std::size_t n = birkhoff_length(profile);
    std::string summary;
    for (MapKind kind : {MapKind::greedy, MapKind::lazy}) {
        const SampleReport rep = birkhoff_report(Q, kind, 50, n, seed + (kind == MapKind::lazy));
        const double target = density_mean(d, kind);
        const double z = std::abs(rep.mean - target) / rep.stderr_;
        c.require(rep.stderr_ > 0.0 && z <= 4.0, std::string(to_string(kind)) + " off by " + fmt(z) + " stderr");
        summary += std::string(to_string(kind)) + " z=" + fmt(z) + " ";
    }
    if (c.ok) c.detail = summary + "(orbit length " + std::to_string(n) + ")";
    return c;
}

inline Check chebyshev_ordering(std::uint64_t seed) {
    Check c;
    double least = INFINITY;
    for (std::uint64_t i = 0; i < 20; ++i) {
        const BasePair Q = seeded_strict_base(seed + 3, i);
        const GapResult g = chebyshev_gap(Q, invariant_densities(Q));
        least = std::min({least, g.lower_margin(), g.upper_margin()});
        c.require(g.strictly_ordered() && g.lower_margin() > 1e-6 && g.upper_margin() > 1e-6,
                  "ordering fails at base " + std::to_string(i));
    }
    if (c.ok) c.detail = "smallest margin " + fmt(least);
    return c;
}

inline Check univoque_decay(std::uint64_t seed) {
    Check c;
    const BasePair Q = figure_one_base();
    double prev = 1.0;
    std::string seq;
    for (std::size_t depth : {8, 16, 32, 64}) {
        const double f = univoque_fraction(Q, depth, 10000, seed + 4).mean;
        c.require(f <= prev, "fraction rose at depth " + std::to_string(depth));
        prev = f;
        seq += fmt(f) + " ";
    }
    c.require(prev < 0.01, "fraction at depth 64 is " + fmt(prev));
    const double boundary = unique_prefix_fraction(boundary_base(3.0), 64, 10000, seed + 5).mean;
    c.require(boundary > 0.99, "boundary fraction " + fmt(boundary));
    if (c.ok) c.detail = "strict " + seq + "boundary " + fmt(boundary);
    return c;
}

inline Check multiplicity(std::uint64_t seed) {
    Check c;
    const BasePair Q = figure_one_base();
    const double frac = multiplicity_fraction(Q, 48, 1000, seed + 6).mean;
    c.require(frac >= 0.99, "only " + fmt(frac) + " have two expansions at depth 48");
    std::size_t enumerations = 0;
    for (std::uint64_t i = 0; i < 100 && c.ok; ++i) {
        SampleRng rng(seed + 7, i);
        const double x = rng.uniform() * Q.right();
        for (std::size_t depth = 1; depth <= 14 && c.ok; ++depth) {
            const auto words = enumerate_expansions(Q, x, depth);
            const DigitWord g = expansion(Q, x, depth, MapKind::greedy).digits;
            const DigitWord l = expansion(Q, x, depth, MapKind::lazy).digits;
            c.require(!words.empty() && words.back() == g && words.front() == l,
                      "extremality fails at depth " + std::to_string(depth));
            ++enumerations;
        }
    }
    if (c.ok) c.detail = "fraction " + fmt(frac) + ", " + std::to_string(enumerations) + " enumerations";
    return c;
}

inline Check golden_parry() {
    Check c;
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    const BasePair Q(phi, phi);
    const auto [h, bound] = invariant_density(Q, MapKind::greedy);
    // Parry: 1_[0,1) + phi^-1 1_[0,1/phi), normalized by 1 + phi^-2.
    const double z = 1.0 + 1.0 / (phi * phi);
    const StepFunction parry(Q.right(), {1.0 / phi, 1.0}, {(1.0 + 1.0 / phi) / z, 1.0 / z, 0.0});
    const double gap = l1_distance(h, parry);
    c.require(gap <= 1e-9, "L1 gap to Parry density " + fmt(gap));
    if (c.ok) c.detail = "L1 gap " + fmt(gap);
    return c;
}

} // namespace detail

/// Runs one criterion (1..10).
inline CriterionResult run_criterion(int id, const VerifyOptions& opt) {
    struct Spec {
        const char* name;
        double budget;
        std::function<detail::Check()> run;
    };
    const std::uint64_t s = opt.seed;
    const Spec specs[] = {
        {"figure-1 density", 1.0, [] { return detail::figure_one(); }},
        {"boundary family", 1.0, [] { return detail::boundary_family(); }},
        {"fixed-point identity", 0.0, [s] { return detail::fixed_point_identity(s); }},
        {"transfer convergence", 10.0, [] { return detail::transfer_convergence(); }},
        {"partition structure", 0.0, [s] { return detail::partition_structure(s); }},
        {"birkhoff agreement", 20.0, [s, p = opt.profile] { return detail::birkhoff_agreement(s, p); }},
        {"chebyshev gap", 0.0, [s] { return detail::chebyshev_ordering(s); }},
        {"univoque decay", 30.0, [s] { return detail::univoque_decay(s); }},
        {"multiplicity", 0.0, [s] { return detail::multiplicity(s); }},
        {"golden-ratio parry", 0.0, [] { return detail::golden_parry(); }},
    };
    if (id < 1 || id > 10) throw Error(ErrorKind::NotFound, "no criterion " + std::to_string(id));
    const Spec& spec = specs[id - 1];
    const auto t0 = std::chrono::steady_clock::now();
    detail::Check c;
    try {
        c = spec.run();
    } catch (const Error& e) {
        c.ok = false;
        c.detail = e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.ok && spec.budget > 0.0 && secs > spec.budget) {
        c.ok = false;
        c.detail = "took " + detail::fmt(secs) + " s, budget " + detail::fmt(spec.budget) + " s";
    }
    return {id, spec.name, c.ok, c.detail, secs, spec.budget};
}

inline std::vector<CriterionResult> run_verification(const VerifyOptions& opt) {
    std::vector<CriterionResult> out;
    for (int id = 1; id <= 10; ++id) out.push_back(run_criterion(id, opt));
    return out;
}

} // namespace qexp
