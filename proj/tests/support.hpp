#pragma once

#include <cmath>
#include <ostream>
#include <random>

#include <qexp/qexp.hpp>

namespace testing_support {

/// Strict pair with q0 in [lo, hi) and q1 strictly inside (1, q0/(q0-1)).
inline qexp::BasePair random_strict_base(std::mt19937_64& rng, double lo = 1.2, double hi = 3.5) {
    std::uniform_real_distribution<double> u0(lo, hi);
    std::uniform_real_distribution<double> frac(0.08, 0.92);
    const double q0 = u0(rng);
    const double q1 = 1.0 + frac(rng) * (q0 / (q0 - 1.0) - 1.0);
    return qexp::BasePair(q0, q1);
}

inline double uniform_in(std::mt19937_64& rng, double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(rng);
}

/// Figure-1 base solved once per process.
inline const qexp::BasePair& fig() {
    static const qexp::BasePair Q = qexp::figure_one_base();
    return Q;
}

/// The rounded pair as printed, for plain arithmetic examples.
inline qexp::BasePair printed_pair() { return qexp::BasePair(2.1479, 1.46557); }

inline const double kPhi = 0.5 * (1.0 + std::sqrt(5.0));

} // namespace testing_support

namespace qexp {
inline void PrintTo(const DigitWord& w, std::ostream* os) { *os << '"' << w.str() << '"'; }
} // namespace qexp
