#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "density.hpp"
#include "maps.hpp"
#include "stepfn.hpp"

namespace qexp {

// ---------------------------------------------------------------------------
// Deterministic randomness and parallel loops

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based stream: sample i of run `seed` always sees the same numbers,
/// whatever the worker count or visiting order.
class SampleRng {
public:
    SampleRng(std::uint64_t seed, std::uint64_t index) noexcept : state_(mix64(mix64(seed) ^ index)) {}

    std::uint64_t next_u64() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }
    /// Uniform in [0, 1).
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

/// Worker count: hardware concurrency capped by QEXP_THREADS.
inline unsigned worker_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("QEXP_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

/// Calls fn(i) for i in [0, n) on a static partition of the index range.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), std::max<std::size_t>(n, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            const std::size_t lo = n * w / workers;
            const std::size_t hi = n * (w + 1) / workers;
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
}

/// Monte Carlo summary of one statistic.
struct SampleReport {
    BasePair base;
    std::size_t n_samples;
    std::size_t depth;
    std::uint64_t seed;
    std::string statistic;
    double mean;
    double stderr_;
};

/// Mean and standard error of per-sample values, summed in index order.
inline std::pair<double, double> mean_and_stderr(const std::vector<double>& xs) {
    if (xs.empty()) return {0.0, 0.0};
    detail::CompensatedSum s;
    for (double x : xs) s.add(x);
    const double mean = s.value() / static_cast<double>(xs.size());
    if (xs.size() < 2) return {mean, 0.0};
    detail::CompensatedSum ss;
    for (double x : xs) ss.add((x - mean) * (x - mean));
    const double var = ss.value() / static_cast<double>(xs.size() - 1);
    return {mean, std::sqrt(var / static_cast<double>(xs.size()))};
}

// ---------------------------------------------------------------------------
// Birkhoff averages

struct BirkhoffResult {
    double average;
    /// Largest |theta_j - x_j| over the checked indices.
    double theta_gap;
    std::vector<std::size_t> checked;
    bool theta_consistent;
};

/// (1/n) sum_{j<n} T^j x, with the normalized-error identity theta_j = T^j x
/// checked at j in {1, n/2, n} wherever floating error allows (see below).
inline BirkhoffResult birkhoff_average(const BasePair& Q, double x, std::size_t n, MapKind kind) {
    if (n == 0) throw Error(ErrorKind::OutOfDomain, "birkhoff_average needs n >= 1");
    x = detail::require_in_domain(Q, x, "birkhoff_average");

    // theta_j amplifies rounding by up to qmax^j; only indices whose
    // predicted error stays below 1e-6 (and j <= 60) are checked.
    const double scale = std::max(1.0, Q.right());
    const double eps = std::numeric_limits<double>::epsilon();
    auto checkable = [&](std::size_t j) {
        return j >= 1 && j <= 60 && 64.0 * std::pow(Q.qmax(), static_cast<double>(j)) * eps <= 1e-6;
    };
    std::vector<std::size_t> wanted;
    for (std::size_t j : {std::size_t{1}, n / 2, n}) {
        if (checkable(j) && std::find(wanted.begin(), wanted.end(), j) == wanted.end()) wanted.push_back(j);
    }
    const std::size_t keep = wanted.empty() ? 0 : *std::max_element(wanted.begin(), wanted.end());

    DigitWord digits;
    std::vector<double> kept_points;
    detail::CompensatedSum sum;
    double current = x;
    for (std::size_t j = 0; j < n; ++j) {
        sum.add(current);
        const Step s = step(Q, current, kind);
        if (j < keep) {
            digits.push_back(s.digit);
            kept_points.push_back(s.value);
        }
        current = s.value;
    }

    BirkhoffResult out{sum.value() / static_cast<double>(n), 0.0, wanted, true};
    for (std::size_t j : wanted) {
        const double theta = normalized_error(Q, x, digits, j);
        out.theta_gap = std::max(out.theta_gap, std::abs(theta - kept_points[j - 1]));
    }
    out.theta_consistent = out.theta_gap <= 1e-6 * scale;
    return out;
}

/// Mean over n_orbits uniformly started orbits of their length-n averages.
inline SampleReport birkhoff_report(const BasePair& Q, MapKind kind, std::size_t n_orbits, std::size_t n,
                                    std::uint64_t seed) {
    std::vector<double> averages(n_orbits);
    parallel_for(n_orbits, [&](std::size_t i) {
        SampleRng rng(seed, i);
        averages[i] = birkhoff_average(Q, rng.uniform() * Q.right(), n, kind).average;
    });
    const auto [mean, se] = mean_and_stderr(averages);
    return {Q, n_orbits, n, seed, std::string("birkhoff_") + std::string(to_string(kind)), mean, se};
}

// ---------------------------------------------------------------------------
// Ordering of the two invariant means

struct GapResult {
    double mean_greedy;
    double midpoint;
    double mean_lazy;

    double lower_margin() const noexcept { return midpoint - mean_greedy; }
    double upper_margin() const noexcept { return mean_lazy - midpoint; }
    bool strictly_ordered() const noexcept { return mean_greedy < midpoint && midpoint < mean_lazy; }
};

/// (mean of h_greedy, 1/(2(q1-1)), mean of h_lazy). The first is below the
/// midpoint of I_Q and the last above it when Q is strict.
inline GapResult chebyshev_gap(const BasePair& Q, const DensityPair& d) {
    if (!Q.strict()) {
        throw Error(ErrorKind::NotStrict, "on the boundary q0 + q1 = q0 q1 both densities are uniform");
    }
    return {density_mean(d, MapKind::greedy), 0.5 * Q.right(), density_mean(d, MapKind::lazy)};
}

// ---------------------------------------------------------------------------
// Expansion branching

inline constexpr std::size_t kMaxEnumerationDepth = 24;
inline constexpr std::size_t kMaxEnumeratedWords = std::size_t{1} << 20;

/// All words of length `depth` that can start an expansion of x, sorted
/// lexicographically.
inline std::vector<DigitWord> enumerate_expansions(const BasePair& Q, double x, std::size_t depth) {
    if (depth > kMaxEnumerationDepth) {
        throw Error(ErrorKind::BranchOverflow, "enumerate_expansions supports depth <= 24");
    }
    x = detail::require_in_domain(Q, x, "enumerate_expansions");
    std::vector<DigitWord> out;
    DigitWord path;
    auto dfs = [&](auto&& self, double v) -> void {
        if (path.size() == depth) {
            if (out.size() >= kMaxEnumeratedWords) {
                throw Error(ErrorKind::BranchOverflow, "more than 2^20 expansions at depth " + std::to_string(depth));
            }
            out.push_back(path);
            return;
        }
        const DigitSet allowed = admissible_digits(Q, v);
        for (int d = 0; d < 2; ++d) {
            if (d == 0 ? !allowed.zero : !allowed.one) continue;
            path.push_back(d);
            self(self, detail::branch(Q, d, v).value);
            path.pop_back();
        }
    };
    dfs(dfs, x);
    return out;
}

/// Number of length-`depth` expansion prefixes of x, saturating at `cap`.
inline std::size_t count_expansions(const BasePair& Q, double x, std::size_t depth, std::size_t cap) {
    x = detail::require_in_domain(Q, x, "count_expansions");
    std::size_t count = 0;
    auto dfs = [&](auto&& self, double v, std::size_t level) -> void {
        if (count >= cap) return;
        if (level == depth) {
            ++count;
            return;
        }
        const DigitSet allowed = admissible_digits(Q, v);
        if (allowed.zero) self(self, detail::branch(Q, 0, v).value, level + 1);
        if (allowed.one) self(self, detail::branch(Q, 1, v).value, level + 1);
    };
    dfs(dfs, x, 0);
    return count;
}

/// True when the greedy and lazy expansions of x agree on the first `depth`
/// digits, which is exactly when x has a single expansion prefix of that length.
inline bool unique_to_depth(const BasePair& Q, double x, std::size_t depth) {
    double g = x;
    double l = x;
    for (std::size_t k = 0; k < depth; ++k) {
        const Step sg = greedy_step(Q, g);
        const Step sl = lazy_step(Q, l);
        if (sg.digit != sl.digit) return false;
        g = sg.value;
        l = sl.value;
    }
    return true;
}

/// Fraction of uniform samples on I_Q that are unique to `depth`, with its
/// binomial standard error. Defined for every admissible base.
inline SampleReport unique_prefix_fraction(const BasePair& Q, std::size_t depth, std::size_t n_samples,
                                           std::uint64_t seed) {
    std::vector<unsigned char> hit(n_samples, 0);
    parallel_for(n_samples, [&](std::size_t i) {
        SampleRng rng(seed, i);
        hit[i] = unique_to_depth(Q, rng.uniform() * Q.right(), depth) ? 1 : 0;
    });
    std::size_t count = 0;
    for (auto h : hit) count += h;
    const double n = static_cast<double>(std::max<std::size_t>(n_samples, 1));
    const double p = static_cast<double>(count) / n;
    return {Q, n_samples, depth, seed, "univoque", p, std::sqrt(p * (1.0 - p) / n)};
}

/// unique_prefix_fraction restricted to strict bases, where the univoque
/// set is Lebesgue-null and the fraction must decay with depth.
inline SampleReport univoque_fraction(const BasePair& Q, std::size_t depth, std::size_t n_samples, std::uint64_t seed) {
    if (!Q.strict()) throw Error(ErrorKind::NotStrict, "univoque_fraction needs q0 + q1 > q0 q1");
    return unique_prefix_fraction(Q, depth, n_samples, seed);
}

/// Fraction of uniform samples with at least two expansion prefixes of length `depth`.
inline SampleReport multiplicity_fraction(const BasePair& Q, std::size_t depth, std::size_t n_samples,
                                          std::uint64_t seed) {
    std::vector<unsigned char> hit(n_samples, 0);
    parallel_for(n_samples, [&](std::size_t i) {
        SampleRng rng(seed, i);
        hit[i] = count_expansions(Q, rng.uniform() * Q.right(), depth, 2) >= 2 ? 1 : 0;
    });
    std::size_t count = 0;
    for (auto h : hit) count += h;
    const double n = static_cast<double>(std::max<std::size_t>(n_samples, 1));
    const double p = static_cast<double>(count) / n;
    return {Q, n_samples, depth, seed, "count", p, std::sqrt(p * (1.0 - p) / n)};
}

// ---------------------------------------------------------------------------
// Correlation decay

/// Exact inverse-CDF sampler for a non-negative step density.
class StepDensitySampler {
public:
    explicit StepDensitySampler(const StepFunction& density) : f_(density) {
        cumulative_.reserve(f_.piece_count() + 1);
        cumulative_.push_back(0.0);
        double acc = 0.0;
        for (std::size_t i = 0; i < f_.piece_count(); ++i) {
            if (f_.values()[i] < 0.0) throw Error(ErrorKind::OutOfDomain, "density must be non-negative");
            acc += f_.values()[i] * f_.piece_length(i);
            cumulative_.push_back(acc);
        }
        if (!(acc > 0.0)) throw Error(ErrorKind::ZeroIntegral, "cannot sample a density with zero mass");
    }

    /// Maps u in [0, 1) to a point distributed according to the density.
    double operator()(double u) const {
        const double target = u * cumulative_.back();
        auto it = std::upper_bound(cumulative_.begin() + 1, cumulative_.end(), target);
        std::size_t i = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
        while (i + 1 < cumulative_.size() - 1 && f_.values()[i] == 0.0) ++i;
        i = std::min(i, f_.piece_count() - 1);
        const double mass = f_.values()[i] * f_.piece_length(i);
        const double frac = mass > 0.0 ? (target - cumulative_[i]) / mass : 0.0;
        return f_.piece_left(i) + std::clamp(frac, 0.0, 1.0) * f_.piece_length(i);
    }

private:
    StepFunction f_;
    std::vector<double> cumulative_;
};

struct Correlation {
    std::size_t n;
    double value;
    double stderr_;
};

/// Estimates C_n = mu(A cap T^-n B) - mu(A) mu(B), n = 0..n_max, for the
/// invariant measure of the chosen map by sampling from its density.
/// mu(A) and mu(B) are exact integrals of the density.
inline std::vector<Correlation> mixing_correlation(const BasePair& Q, const DensityPair& d, MapKind kind,
                                                   const Interval& A, const Interval& B, std::size_t n_max,
                                                   std::size_t n_samples, std::uint64_t seed) {
    const double tol = 1e-12 * std::max(1.0, Q.right());
    const double support_lo = kind == MapKind::greedy ? 0.0 : Q.ell();
    const double support_hi = kind == MapKind::greedy ? Q.r() : Q.right();
    for (const Interval* iv : {&A, &B}) {
        if (iv->empty() || iv->lo < support_lo - tol || iv->hi > support_hi + tol) {
            throw Error(ErrorKind::OutOfDomain, "correlation sets must lie in the support of the density");
        }
    }
    const StepFunction& h = d.density(kind);
    const double mu_a = mass_on(h, A.lo, A.hi);
    const double mu_b = mass_on(h, B.lo, B.hi);
    const StepDensitySampler sampler(h);

    const std::size_t width = n_max + 1;
    std::vector<unsigned char> joint(n_samples * width, 0);
    parallel_for(n_samples, [&](std::size_t i) {
        SampleRng rng(seed, i);
        double x = sampler(rng.uniform());
        if (!A.contains(x)) return;
        for (std::size_t n = 0; n <= n_max; ++n) {
            if (B.contains(x)) joint[i * width + n] = 1;
            if (n < n_max) x = step(Q, x, kind).value;
        }
    });

    std::vector<Correlation> out;
    out.reserve(width);
    const double N = static_cast<double>(std::max<std::size_t>(n_samples, 1));
    for (std::size_t n = 0; n <= n_max; ++n) {
        std::size_t count = 0;
        for (std::size_t i = 0; i < n_samples; ++i) count += joint[i * width + n];
        const double p = static_cast<double>(count) / N;
        out.push_back({n, p - mu_a * mu_b, std::sqrt(std::max(p * (1.0 - p), 1.0 / N) / N)});
    }
    return out;
}

} // namespace qexp
