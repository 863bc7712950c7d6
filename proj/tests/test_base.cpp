#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "support.hpp"

using namespace qexp;
using testing_support::fig;
using testing_support::random_strict_base;

TEST(NewBase, BoundaryPairThreeHalves) {
    const BasePair Q = new_base(3.0, 1.5);
    EXPECT_DOUBLE_EQ(Q.ell(), 0.0);
    EXPECT_DOUBLE_EQ(Q.r(), 2.0);
    EXPECT_DOUBLE_EQ(Q.right(), 2.0);
    EXPECT_DOUBLE_EQ(Q.greedy_switch(), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(Q.lazy_switch(), 2.0 / 3.0);
    EXPECT_FALSE(Q.strict());
}

TEST(NewBase, PrintedFigurePair) {
    const BasePair Q = new_base(2.1479, 1.46557);
    EXPECT_NEAR(Q.r(), 1.465573, 5e-6);
    EXPECT_TRUE(Q.strict());
}

TEST(NewBase, RejectsProductAboveSum) {
    try {
        new_base(2.0, 2.5);
        FAIL() << "expected InvalidBase";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidBase);
        EXPECT_NE(std::string(e.what()).find("InvalidBase"), std::string::npos);
    }
}

TEST(NewBase, EqualityIsAdmissible) {
    const BasePair Q = new_base(2.0, 2.0);
    EXPECT_EQ(Q.ell(), 0.0);
    EXPECT_EQ(Q.r(), 1.0);
    EXPECT_EQ(Q.right(), 1.0);
    EXPECT_FALSE(Q.strict());
}

TEST(NewBase, RejectsBasesAtMostOne) {
    for (auto [a, b] : {std::pair{1.0, 1.5}, std::pair{1.5, 1.0}, std::pair{0.5, 3.0}, std::pair{-2.0, 1.1}}) {
        try {
            new_base(a, b);
            FAIL() << a << "," << b;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::InvalidBase);
        }
    }
}

TEST(NewBase, RejectsNonFinite) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    for (auto [a, b] : {std::pair{nan, 1.5}, std::pair{2.0, inf}, std::pair{inf, inf}}) {
        try {
            new_base(a, b);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::NonFinite);
        }
    }
}

TEST(BaseProperties, OrderingOfDerivedConstants) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 500; ++i) {
        const BasePair Q = random_strict_base(rng, 1.05, 6.0);
        EXPECT_LE(0.0, Q.ell());
        EXPECT_LE(Q.ell(), Q.lazy_switch());
        EXPECT_LE(Q.greedy_switch(), Q.r());
        EXPECT_LE(Q.r(), Q.right());
        EXPECT_LT(Q.greedy_switch(), Q.lazy_switch());
        EXPECT_GT(Q.greedy_switch(), 0.0);
        EXPECT_LT(Q.lazy_switch(), Q.right());
        EXPECT_TRUE(Q.strict());
    }
}

TEST(BaseProperties, BoundaryCollapse) {
    for (double q0 : {1.1, 1.5, 2.0, 2.5, 3.0, 4.0, 7.0}) {
        const BasePair Q = boundary_base(q0);
        EXPECT_FALSE(Q.strict()) << q0;
        EXPECT_NEAR(Q.ell(), 0.0, 1e-12);
        EXPECT_NEAR(Q.r(), Q.right(), 1e-12);
        EXPECT_NEAR(Q.greedy_switch(), Q.lazy_switch(), 1e-12);
        EXPECT_GT(Q.greedy_switch(), 0.0);
        EXPECT_LT(Q.lazy_switch(), Q.right());
    }
}

TEST(SolveBase, FigureOnePair) {
    const BasePair& Q = fig();
    EXPECT_NEAR(Q.q0(), 2.1479, 5e-5);
    EXPECT_NEAR(Q.q1(), 1.46557, 5e-6);
    EXPECT_NEAR(evaluate(Q, DigitWord::parse("111"), Tail::zeros), Q.r(), 1e-10);
    EXPECT_NEAR(evaluate(Q, DigitWord::parse("00"), Tail::ones), Q.ell(), 1e-10);
    // Independent residuals written out by hand.
    const double q0 = Q.q0();
    const double q1 = Q.q1();
    EXPECT_NEAR(1 / q1 + 1 / (q1 * q1) + 1 / (q1 * q1 * q1), q0 / q1, 1e-10);
    EXPECT_NEAR(1 / (q0 * q0 * (q1 - 1)), q1 / (q0 * (q1 - 1)) - 1, 1e-10);
}

TEST(SolveBase, DegeneratePairIsUnderDetermined) {
    try {
        solve_base({DigitWord{}, Tail::ones}, {DigitWord{}, Tail::zeros});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NoSolution);
    }
    try {
        solve_base({DigitWord::parse("1"), Tail::ones}, {DigitWord::parse("00"), Tail::zeros});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NoSolution);
    }
}

namespace {

/// First index k < n at which the digit of the orbit of x is not
/// determined: the distance to the switch point is within the error
/// A_k * 1e-10 inherited from a root solved to residual 1e-10.
std::size_t first_tie(const BasePair& Q, double x, std::size_t n, MapKind kind) {
    const double sw = kind == MapKind::greedy ? Q.greedy_switch() : Q.lazy_switch();
    const OrbitRecord o = expansion(Q, x, n, kind);
    double A = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(o.points[k] - sw) <= A * 1e-10) return k;
        A *= Q.q(o.digits[k]);
    }
    return n;
}

void expect_round_trip(const BasePair& Q, const TailedWord& g, const TailedWord& l, std::size_t depth) {
    const OrbitRecord og = expansion(Q, Q.r(), depth, MapKind::greedy);
    const OrbitRecord ol = expansion(Q, Q.ell(), depth, MapKind::lazy);
    const std::size_t tg = first_tie(Q, Q.r(), depth, MapKind::greedy);
    const std::size_t tl = first_tie(Q, Q.ell(), depth, MapKind::lazy);
    auto padded = [depth](const TailedWord& w) {
        DigitWord out = w.word;
        while (out.size() < depth) out.push_back(w.tail == Tail::ones ? 1 : 0);
        return out.prefix(depth);
    };
    EXPECT_EQ(og.digits.prefix(tg), padded(g).prefix(tg));
    EXPECT_EQ(ol.digits.prefix(tl), padded(l).prefix(tl));
}

} // namespace

TEST(SolveBase, ShortWordsHaveNoRoot) {
    // "0" + 1^inf makes ell_Q = R/q0, i.e. ell_Q - R/q0 = 1/q0 - 1 < 0 for every q0 > 1.
    for (double q0 = 1.01; q0 < 8.0; q0 += 0.01) {
        for (double q1 : {1.01, 1.5, 2.0, 3.0, 3.99}) {
            const double right = 1.0 / (q1 - 1.0);
            const double ell = q1 / (q0 * (q1 - 1.0)) - 1.0;
            EXPECT_LT(ell - right / q0, 0.0);
        }
    }
    try {
        solve_base({DigitWord::parse("11"), Tail::zeros}, {DigitWord::parse("0"), Tail::ones});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NoSolution);
    }
}

TEST(SolveBase, FigureOneRoundTrip) {
    expect_round_trip(fig(), {DigitWord::parse("111"), Tail::zeros}, {DigitWord::parse("00"), Tail::ones}, 32);
}

TEST(SolveBase, RandomCriticalExpansionsRoundTrip) {
    std::mt19937_64 rng(2024);
    int solved = 0;
    while (solved < 20) {
        const BasePair Q = random_strict_base(rng, 1.4, 3.5);
        // 32 digits pin Q only when qmin^32 is large; near q1 = 1 the
        // truncated lazy word degenerates to 01^inf, which has no root.
        if (Q.qmin() < 1.15) continue;
        const TailedWord g{expansion(Q, Q.r(), 32, MapKind::greedy).digits, Tail::zeros};
        const TailedWord l{expansion(Q, Q.ell(), 32, MapKind::lazy).digits, Tail::ones};
        const BasePair P = solve_base(g, l);
        EXPECT_NEAR(evaluate(P, g.word, g.tail), P.r(), 1e-10);
        EXPECT_NEAR(evaluate(P, l.word, l.tail), P.ell(), 1e-10);
        expect_round_trip(P, g, l, 32);
        ++solved;
    }
}

TEST(SolveBase, InadmissibleOrMissingRoot) {
    // 0^inf for r_Q would need q0/q1 = 0: no root in the box.
    try {
        solve_base({DigitWord{}, Tail::zeros}, {DigitWord::parse("0"), Tail::ones});
        FAIL();
    } catch (const Error& e) {
        EXPECT_TRUE(e.kind() == ErrorKind::NoSolution || e.kind() == ErrorKind::InvalidBase);
    }
}

TEST(MapKindNames, Strings) {
    EXPECT_EQ(to_string(MapKind::greedy), "greedy");
    EXPECT_EQ(to_string(MapKind::lazy), "lazy");
    EXPECT_EQ(to_string(ErrorKind::BranchOverflow), "BranchOverflow");
}
