#include "vlp/error.hpp"
#include "vlp/modular.hpp"
#include "vlp/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace vlp;

namespace {

double log_family_constant(double lambda) { return (1.0 / lambda) / (1.0 + std::log(lambda)); }

// Term-by-term series for the constant c against spiked(J,s,b).
double spiked_constant_series(int J, double s, double b, double c)
{
    auto v = [&](long j) { return std::max(b, s * static_cast<double>(j)); };
    double per_cell = std::ldexp(1.0, -2 * J) * std::pow(c, b);
    for (int j = 1; j <= J; ++j)
        per_cell += std::ldexp(1.0, -j - J) * std::pow(c, v(j));
    double total = (std::ldexp(1.0, J) - 1.0) * per_cell;
    for (long j = J + 1; j < 100000; ++j) {
        const double term = std::exp(-static_cast<double>(j) * std::numbers::ln2 + v(j) * std::log(c));
        total += term;
        if (term < 1e-18 * total)
            break;
    }
    return total;
}

QuadConfig quadrature_only()
{
    QuadConfig cfg;
    cfg.closed_forms = false;
    return cfg;
}

} // namespace

TEST(Modular, UnitIndicatorIsOneForEveryExponent)
{
    for (const auto& p : {Exponent::constant(3.0), Exponent::log_family(), Exponent::spiked(6, 4.0, 2.0),
                          Exponent::log_family().dual()}) {
        const auto r = modular(Func::constant(1.0), p);
        ASSERT_TRUE(r.finite());
        EXPECT_NEAR(r.value, 1.0, 1e-12) << p.label();
    }
}

TEST(Modular, IndicatorModularIsItsMeasure)
{
    Rng rng(11);
    for (const auto& p : {Exponent::log_family(), Exponent::spiked(5, 4.0, 2.0),
                          Exponent::piecewise({0.0, 0.3, 1.0}, {1.5, 7.0})}) {
        for (int i = 0; i < 10; ++i) {
            double a = rng.uniform(), b = rng.uniform();
            if (a > b)
                std::swap(a, b);
            const auto r = modular(Func::indicator(a, b), p);
            EXPECT_NEAR(r.value, b - a, 1e-13);
        }
    }
}

TEST(Modular, SquareOfIdentity)
{
    const auto x = Func::piecewise_poly({0.0, 1.0}, {Poly{0.0, 1.0}});
    EXPECT_NEAR(modular_scaled(x, Exponent::constant(2.0), 1.0).value, 1.0 / 3.0, 1e-14);
    EXPECT_NEAR(modular(x, Exponent::constant(2.0), quadrature_only()).value, 1.0 / 3.0, 1e-12);
}

TEST(Modular, LogFamilyConstantClosedFormMatchesQuadrature)
{
    const auto p = Exponent::log_family();
    for (double lambda : {0.5, 0.75, 1.0, 2.0}) {
        const double want = log_family_constant(lambda);
        const auto exact = modular_scaled(Func::constant(1.0), p, lambda);
        const auto quad = modular_scaled(Func::constant(1.0), p, lambda, quadrature_only());
        ASSERT_TRUE(exact.finite() && quad.finite());
        EXPECT_TRUE(exact.closed_form);
        EXPECT_FALSE(quad.closed_form);
        EXPECT_NEAR(exact.value, want, 1e-14 * want);
        EXPECT_NEAR(quad.value, want, 1e-8 * want) << lambda;
    }
}

TEST(Modular, LogFamilyIndicatorNearZero)
{
    const double s = std::exp(-1.0);
    const auto chi = Func::indicator(0.0, s);
    EXPECT_NEAR(modular(chi, Exponent::log_family()).value, s, 1e-15);
    for (double lambda : {0.5, 0.9, 3.0}) {
        const double L = std::log(lambda);
        const double want = std::pow(s, 1.0 + L) / (lambda * (1.0 + L));
        EXPECT_NEAR(modular_scaled(chi, Exponent::log_family(), lambda).value, want, 1e-13 * want);
        EXPECT_NEAR(modular_scaled(chi, Exponent::log_family(), lambda, quadrature_only()).value, want, 1e-8 * want);
    }
}

TEST(Modular, LogFamilyDivergesForConstantE)
{
    const auto r = modular(Func::constant(std::numbers::e), Exponent::log_family());
    EXPECT_EQ(r.status, ModularStatus::Divergent);
    EXPECT_TRUE(r.closed_form);
    EXPECT_NE(r.divergence_witness.find("t=0"), std::string::npos);
    EXPECT_EQ(modular_scaled(Func::constant(1.0), Exponent::log_family(), 0.3).status, ModularStatus::Divergent);
}

TEST(Modular, LadderRuleAgreesWithClosedFormVerdicts)
{
    QuadConfig ladder = quadrature_only();
    ladder.asymptotic_tail = false;
    const auto p = Exponent::log_family();
    // clearly divergent: the ladder alone passes the cap with growing rungs
    for (double c : {std::exp(2.0), 10.0, 50.0}) {
        const auto r = modular(Func::constant(c), p, ladder);
        EXPECT_EQ(r.status, ModularStatus::Divergent) << c;
        EXPECT_EQ(modular(Func::constant(c), p).status, ModularStatus::Divergent);
    }
    // clearly convergent: the ladder converges geometrically
    for (double c : {1.0, 2.0, 0.5}) {
        const auto r = modular(Func::constant(c), p, ladder);
        ASSERT_TRUE(r.finite());
        const double want = log_family_constant(1.0 / c);
        EXPECT_NEAR(r.value, want, 1e-8 * want);
    }
    // borderline: rungs stay flat and never pass the cap, so neither verdict is honest
    EXPECT_THROW(modular(Func::constant(std::numbers::e), p, ladder), InconclusiveError);
}

TEST(Modular, SpikedConstantMatchesSeries)
{
    const auto p = Exponent::spiked(10, 4.0, 2.0);
    for (double c : {0.5, 1.0, 1.1, 1.18}) {
        const double want = spiked_constant_series(10, 4.0, 2.0, c);
        const auto exact = modular(Func::constant(c), p);
        ASSERT_TRUE(exact.finite()) << c;
        EXPECT_NEAR(exact.value, want, 1e-12 * want) << c;
    }
    const double above = std::pow(2.0, 0.25) * 1.001;
    EXPECT_EQ(modular(Func::constant(above), p).status, ModularStatus::Divergent);
    EXPECT_TRUE(modular(Func::constant(above / 1.002), p).finite());
}

TEST(Modular, SpikedTailQuadratureAgreesWithClosedForm)
{
    const auto p = Exponent::spiked(4, 4.0, 2.0);
    const double c = 1.15;
    const double want = spiked_constant_series(4, 4.0, 2.0, c);
    const auto quad = modular(Func::constant(c), p, quadrature_only());
    ASSERT_TRUE(quad.finite());
    EXPECT_NEAR(quad.value, want, 1e-8 * want);

    QuadConfig ladder = quadrature_only();
    ladder.asymptotic_tail = false;
    EXPECT_EQ(modular(Func::constant(1.5), p, ladder).status, ModularStatus::Divergent);
}

TEST(Modular, LinearPiecesUseStableClosedForm)
{
    const auto f = Func::piecewise_poly({0.0, 0.4, 1.0}, {Poly{-1.0, 3.0}, Poly{0.2, 0.0}});
    for (double q : {1.5, 2.0, 7.0, 40.0}) {
        const auto exact = modular(f, Exponent::constant(q));
        const auto quad = modular(f, Exponent::constant(q), quadrature_only());
        EXPECT_NEAR(exact.value, quad.value, 1e-9 * quad.value + 1e-12) << q;
    }
    // tiny slope relative to the value: naive differences of powers would cancel
    const auto flat = Func::piecewise_poly({0.0, 1.0}, {Poly{1.0, 1e-9}});
    EXPECT_NEAR(modular(flat, Exponent::constant(3.0)).value, 1.0 + 1.5e-9, 1e-14);
}

TEST(Modular, MonotoneInLambda)
{
    Rng rng(5);
    const auto p = Exponent::log_family();
    for (int i = 0; i < 10; ++i) {
        const auto f = Func::piecewise_poly({0.0, 0.5, 1.0}, {Poly{rng.uniform(-1, 1), rng.uniform(-1, 1)},
                                                             Poly{rng.uniform(-1, 1), rng.uniform(-1, 1)}});
        double previous = std::numeric_limits<double>::infinity();
        for (double lambda = 0.5; lambda <= 4.0; lambda *= 1.25) {
            const auto r = modular_scaled(f, p, lambda);
            const double v = r.finite() ? r.value : std::numeric_limits<double>::infinity();
            EXPECT_LE(v, previous * (1 + 1e-9));
            previous = v;
        }
    }
}

TEST(Modular, AdditiveOverDisjointSupports)
{
    const auto p = Exponent::spiked(6, 4.0, 2.0);
    const auto f = Func::piecewise_poly({0.0, 1.0}, {Poly{0.3, 0.5, -0.2}});
    const auto A = MeasSet::interval(0.0, 0.37);
    const auto B = MeasSet::interval(0.37, 0.81);
    const double a = modular(Func::masked(f, A), p).value;
    const double b = modular(Func::masked(f, B), p).value;
    const double ab = modular(Func::masked(f, A.unite(B)), p).value;
    EXPECT_NEAR(a + b, ab, 1e-9 * ab);
}

TEST(Modular, ScaledRejectsNonPositiveLambda)
{
    EXPECT_THROW(modular_scaled(Func::constant(1.0), Exponent::constant(2.0), 0.0), DomainError);
    QuadConfig bad;
    bad.divergence_cap = 0.5;
    EXPECT_THROW(modular(Func::constant(1.0), Exponent::constant(2.0), bad), DomainError);
}

TEST(Modular, InconclusiveWhenBudgetIsExhausted)
{
    QuadConfig tight;
    tight.max_subdivisions = 2;
    tight.closed_forms = false;
    const auto f = Func::analytic({AnalyticTerm::Tag::Sin, 1.0, 200.0, 0.0});
    EXPECT_THROW(modular(f, Exponent::log_family(), tight), InconclusiveError);
}
