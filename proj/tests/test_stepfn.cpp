#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace qexp;
using testing_support::uniform_in;

namespace {

StepFunction random_step(std::mt19937_64& rng, double R, std::size_t max_breaks, double lo = 0.1, double hi = 3.0) {
    const std::size_t m = rng() % (max_breaks + 1);
    std::vector<double> b;
    for (std::size_t i = 0; i < m; ++i) b.push_back(uniform_in(rng, 0.0, R));
    std::sort(b.begin(), b.end());
    std::vector<double> v;
    for (std::size_t i = 0; i <= m; ++i) v.push_back(uniform_in(rng, lo, hi));
    return StepFunction(R, b, v);
}

/// Midpoint-rule integral of |f| on a fine grid: independent of piece bookkeeping.
double grid_integral(const StepFunction& f, int n = 200000) {
    const double h = f.domain_right() / n;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += f.eval((i + 0.5) * h);
    return s * h;
}

} // namespace

TEST(Eval, Constant) {
    const StepFunction f = StepFunction::constant(2.0, 3.25);
    for (double x : {0.0, 0.3, 1.9, 2.0}) EXPECT_EQ(f(x), 3.25);
}

TEST(Eval, FinalPieceIsClosed) {
    // 1_[0,r) with r = right has no interior breakpoint.
    const StepFunction f = StepFunction::indicator(2.0, 0.0, 2.0);
    EXPECT_TRUE(f.breakpoints().empty());
    EXPECT_EQ(f(2.0), 1.0);
    const StepFunction g(2.0, {1.0}, {1.0, 0.0});
    EXPECT_EQ(g(1.0), 0.0);
    EXPECT_EQ(g(std::nextafter(1.0, 0.0)), 1.0);
    EXPECT_EQ(g(2.0), 0.0);
}

TEST(Eval, UnnormalizedFigureJumpFunction) {
    const StepFunction f(1.465573, {0.682328, 1.1479}, {2.1479, 1.68233, 1.0});
    EXPECT_EQ(f(0.7), 1.68233);
}

TEST(Eval, OutOfDomain) {
    const StepFunction f = StepFunction::constant(2.0, 1.0);
    EXPECT_THROW(f(2.1), Error);
    EXPECT_THROW(f(-0.1), Error);
    try {
        f(5.0);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::OutOfDomain);
    }
}

TEST(Construction, Validation) {
    EXPECT_THROW(StepFunction(0.0, {}, {1.0}), Error);
    EXPECT_THROW(StepFunction(1.0, {0.5}, {1.0}), Error);
    EXPECT_THROW(StepFunction(1.0, {0.6, 0.5}, {1.0, 2.0, 3.0}), Error);
    EXPECT_THROW(StepFunction(1.0, {}, {NAN}), Error);
}

TEST(Construction, CanonicalForm) {
    // Equal neighbours merge, zero-length pieces vanish.
    const StepFunction f(3.0, {0.0, 1.0, 1.0, 2.0, 3.0}, {9.0, 1.0, 7.0, 1.0, 2.0, 8.0});
    EXPECT_EQ(f.breakpoints(), (std::vector<double>{2.0}));
    EXPECT_EQ(f.values(), (std::vector<double>{1.0, 2.0}));
    const StepFunction g(1.0, {0.25, 0.5, 0.75}, {1.0, 1.0, 2.0, 2.0});
    EXPECT_EQ(g.breakpoints(), (std::vector<double>{0.5}));
}

TEST(Construction, NearbyBreakpointsCollapse) {
    const StepFunction f(1.0, {0.5, 0.5 + 4e-12}, {1.0, 2.0, 3.0});
    ASSERT_EQ(f.breakpoints().size(), 1u);
    EXPECT_NEAR(f.breakpoints()[0], 0.5 + 2e-12, 1e-16);
    EXPECT_EQ(f.values(), (std::vector<double>{1.0, 3.0}));
    const StepFunction g(1.0, {0.5, 0.5 + 1e-9}, {1.0, 2.0, 3.0});
    EXPECT_EQ(g.breakpoints().size(), 2u);
}

TEST(Combine, AddZero) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 50; ++i) {
        const StepFunction f = random_step(rng, 2.0, 8);
        EXPECT_EQ(f + StepFunction::constant(2.0, 0.0), f);
    }
}

TEST(Combine, NestedIndicators) {
    const StepFunction s = StepFunction::indicator(3.0, 0.0, 1.0) + StepFunction::indicator(3.0, 0.0, 2.0);
    EXPECT_EQ(s.breakpoints(), (std::vector<double>{1.0, 2.0}));
    EXPECT_EQ(s.values(), (std::vector<double>{2.0, 1.0, 0.0}));
}

TEST(Combine, ScaleBoundaryJumpFunction) {
    const double q1 = 1.5;
    const StepFunction h = StepFunction::constant(2.0, q1 / (q1 - 1.0));
    const StepFunction n = scale(h, (q1 - 1.0) * (q1 - 1.0) / q1);
    ASSERT_EQ(n.piece_count(), 1u);
    EXPECT_NEAR(n.values()[0], q1 - 1.0, 1e-15);
}

TEST(Combine, DomainMismatch) {
    try {
        (void)(StepFunction::constant(2.0, 1.0) + StepFunction::constant(2.5, 1.0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DomainMismatch);
    }
}

TEST(Combine, BreakpointCountBound) {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 200; ++i) {
        const StepFunction f = random_step(rng, 1.5, 10);
        const StepFunction g = random_step(rng, 1.5, 10);
        EXPECT_LE((f + g).breakpoints().size(), f.breakpoints().size() + g.breakpoints().size());
        EXPECT_LE((f - g).breakpoints().size(), f.breakpoints().size() + g.breakpoints().size());
    }
}

TEST(Integrate, Constant) {
    const StepFunction f = StepFunction::constant(2.0, 0.75);
    EXPECT_DOUBLE_EQ(integrate(f), 1.5);
    EXPECT_DOUBLE_EQ(first_moment(f), 0.75 * 2.0);
}

TEST(Integrate, FigurePrintedPieces) {
    // Quadrature of the printed piece table.
    const double b[] = {0.0, 0.682328, 1.1479, 1.465573};
    const double v[] = {0.8369, 0.6554, 0.3896};
    double mass = 0.0;
    double moment = 0.0;
    for (int i = 0; i < 3; ++i) {
        mass += v[i] * (b[i + 1] - b[i]);
        moment += v[i] * (b[i + 1] * b[i + 1] - b[i] * b[i]) / 2.0;
    }
    const StepFunction f(2.1479, {b[1], b[2], b[3]}, {v[0], v[1], v[2], 0.0});
    EXPECT_NEAR(integrate(f), 1.0, 5e-4);
    EXPECT_NEAR(integrate(f), mass, 1e-15);
    EXPECT_NEAR(first_moment(f), moment, 1e-15);
    EXPECT_NEAR(first_moment(f), 0.6358, 5e-4);
}

TEST(Integrate, BoundaryUniform) {
    const StepFunction f = StepFunction::constant(2.0, 0.5);
    EXPECT_DOUBLE_EQ(integrate(f), 1.0);
    EXPECT_DOUBLE_EQ(first_moment(f), 1.0);
}

TEST(Integrate, AgreesWithGrid) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 10; ++i) {
        const StepFunction f = random_step(rng, 1.7, 12);
        EXPECT_NEAR(integrate(f), grid_integral(f), 1e-4);
    }
}

TEST(Norms, Examples) {
    std::mt19937_64 rng(4);
    const StepFunction f = random_step(rng, 2.0, 6);
    EXPECT_EQ(l1_distance(f, f), 0.0);
    const StepFunction n = normalize(StepFunction::constant(2.0, 3.0));
    EXPECT_EQ(n.values(), (std::vector<double>{0.5}));
    const StepFunction h(2.1478990357047874, {0.682328, 1.1479, 1.465573}, {2.1479, 1.68233, 1.0, 0.0});
    const StepFunction hn = normalize(h);
    EXPECT_NEAR(hn.values()[0], 0.8369, 5e-4);
    EXPECT_NEAR(hn.values()[1], 0.6554, 5e-4);
    EXPECT_NEAR(hn.values()[2], 0.3896, 5e-4);
    EXPECT_NEAR(l1_distance(StepFunction::indicator(2.0, 0.0, 1.0), StepFunction::indicator(2.0, 0.5, 2.0)), 1.5,
                1e-15);
}

TEST(Norms, NormalizeZero) {
    try {
        normalize(StepFunction::constant(1.0, 0.0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ZeroIntegral);
    }
}

TEST(Norms, NormalizedIntegralIsOne) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) EXPECT_NEAR(integrate(normalize(random_step(rng, 3.0, 15))), 1.0, 1e-12);
}

TEST(StepProperties, CanonicalFormIsUnique) {
    std::mt19937_64 rng(6);
    for (int i = 0; i < 300; ++i) {
        const StepFunction f = random_step(rng, 2.5, 10);
        const StepFunction g = random_step(rng, 2.5, 10);
        const StepFunction back = (f + g) - g;
        ASSERT_EQ(back.breakpoints(), f.breakpoints());
        for (std::size_t k = 0; k < f.piece_count(); ++k) {
            EXPECT_NEAR(back.values()[k], f.values()[k], 1e-12 * std::abs(f.values()[k]));
        }
    }
}

TEST(StepProperties, IntegralIsAdditive) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 300; ++i) {
        const StepFunction f = random_step(rng, 2.5, 10, -2.0, 2.0);
        const StepFunction g = random_step(rng, 2.5, 10, -2.0, 2.0);
        EXPECT_NEAR(integrate(f + g), integrate(f) + integrate(g), 1e-12);
    }
}

TEST(StepProperties, PiecewiseConstantEval) {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 100; ++i) {
        const StepFunction f = random_step(rng, 2.0, 10);
        for (std::size_t k = 0; k < f.piece_count(); ++k) {
            const double a = f.piece_left(k);
            const double len = f.piece_length(k);
            const double v = f(a + 0.5 * len);
            for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) EXPECT_EQ(f(a + t * len), v);
        }
    }
}

TEST(StepProperties, MonotonicityHelpers) {
    const StepFunction dec(2.0, {0.5, 1.0}, {3.0, 2.0, 1.0});
    const StepFunction inc(2.0, {0.5, 1.0}, {0.0, 2.0, 3.0});
    EXPECT_TRUE(is_nonincreasing(dec));
    EXPECT_FALSE(is_nondecreasing(dec));
    EXPECT_TRUE(is_nondecreasing(inc));
    EXPECT_FALSE(is_nonincreasing(inc));
    const StepFunction bump(2.0, {0.5, 1.0}, {3.0, 3.0 + 1e-9, 1.0});
    EXPECT_FALSE(is_nonincreasing(bump));
    EXPECT_TRUE(is_nonincreasing(bump, 1e-6));
}

TEST(StepProperties, MassOnAndMinimum) {
    const StepFunction f(3.0, {1.0, 2.0}, {2.0, -1.0, 4.0});
    EXPECT_DOUBLE_EQ(mass_on(f, 0.5, 2.5), 0.5 * 2.0 + 1.0 + 0.5 * 4.0);
    EXPECT_DOUBLE_EQ(l1_norm(f), 7.0);
    EXPECT_DOUBLE_EQ(min_value_on(f, 0.0, 1.0), 2.0);
    EXPECT_DOUBLE_EQ(min_value_on(f, 0.0, 3.0), -1.0);
    EXPECT_EQ(abs(f).values(), (std::vector<double>{2.0, 1.0, 4.0}));
}

TEST(Csv, BitExactRoundTrip) {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 100; ++i) {
        const StepFunction f = random_step(rng, uniform_in(rng, 0.5, 5.0), 20);
        const std::string text = to_csv(f);
        const StepFunction g = step_function_from_csv(text);
        EXPECT_EQ(g, f);
        EXPECT_EQ(to_csv(g), text);
    }
}

TEST(Csv, Schema) {
    const StepFunction f(2.0, {0.5}, {1.0, 0.25});
    EXPECT_EQ(to_csv(f), "piece_index,left,right,value\n0,0,0.5,1\n1,0.5,2,0.25\n");
    EXPECT_THROW(step_function_from_csv("index,left\n"), Error);
}
