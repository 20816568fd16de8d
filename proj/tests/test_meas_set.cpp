#include "vlp/error.hpp"
#include "vlp/meas_set.hpp"
#include "vlp/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace vlp;

namespace {

MeasSet random_set(Rng& rng)
{
    std::vector<Interval> parts;
    const int n = 1 + static_cast<int>(rng.below(5));
    for (int i = 0; i < n; ++i) {
        const double a = rng.uniform();
        const double b = rng.uniform();
        parts.push_back({Abscissa::at(std::min(a, b)), Abscissa::at(std::max(a, b))});
    }
    return MeasSet(std::move(parts));
}

/// Fraction of a fine midpoint grid inside the set.
double grid_measure(const MeasSet& s)
{
    const int n = 1 << 18;
    int in = 0;
    for (int k = 0; k < n; ++k)
        in += s.contains((k + 0.5) / n);
    return static_cast<double>(in) / n;
}

} // namespace

TEST(MeasSet, BasicShapes)
{
    EXPECT_TRUE(MeasSet().empty());
    EXPECT_EQ(MeasSet::full().measure(), 1.0);
    const auto s = MeasSet::interval(0.25, 0.75);
    EXPECT_EQ(s.measure(), 0.5);
    EXPECT_TRUE(s.contains(0.5));
    EXPECT_FALSE(s.contains(0.8));
    EXPECT_EQ(s.complement().measure(), 0.5);
    EXPECT_EQ(s.complement().intervals().size(), 2u);
}

TEST(MeasSet, OverlappingIntervalsMerge)
{
    const MeasSet s({{Abscissa::at(0.5), Abscissa::at(0.7)},
                     {Abscissa::at(0.1), Abscissa::at(0.3)},
                     {Abscissa::at(0.25), Abscissa::at(0.55)}});
    ASSERT_EQ(s.intervals().size(), 1u);
    EXPECT_DOUBLE_EQ(s.measure(), 0.6);
    const MeasSet empty_parts({{Abscissa::at(0.4), Abscissa::at(0.4)}});
    EXPECT_TRUE(empty_parts.empty());
}

TEST(MeasSet, RejectsPointsOutsideUnitInterval)
{
    EXPECT_THROW(MeasSet::interval(-0.5, 0.5), DomainError);
    EXPECT_THROW(MeasSet::interval(0.5, 1.5), DomainError);
}

TEST(MeasSet, LogCoordinateKeepsTinyEndpointsApart)
{
    const auto a = Abscissa::from_log(-40000.0);
    const auto b = Abscissa::from_log(-39000.0);
    EXPECT_EQ(a.t, 0.0);
    EXPECT_LT(a, b);
    const auto s = MeasSet::interval(a, Abscissa::one());
    EXPECT_NE(s, MeasSet::full());
    EXPECT_EQ(s.measure(), 1.0);
    EXPECT_FALSE(s.complement().empty());
}

TEST(MeasSet, AlgebraIdentities)
{
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const MeasSet a = random_set(rng);
        const MeasSet b = random_set(rng);
        const double inter = a.intersect(b).measure();
        const double uni = a.unite(b).measure();
        EXPECT_NEAR(a.measure() + b.measure(), inter + uni, 1e-14);
        EXPECT_NEAR(a.measure() + a.complement().measure(), 1.0, 1e-14);
        EXPECT_EQ(a.complement().complement(), a);
        EXPECT_TRUE(a.intersect(b).subset_of(a));
        EXPECT_TRUE(a.subset_of(a.unite(b)));
        EXPECT_TRUE(a.intersect(a.complement()).empty());
        // De Morgan
        EXPECT_EQ(a.unite(b).complement(), a.complement().intersect(b.complement()));
        for (std::size_t i = 1; i < a.intervals().size(); ++i)
            EXPECT_LT(a.intervals()[i - 1].hi, a.intervals()[i].lo);
    }
}

TEST(MeasSet, MeasureAgreesWithGridCount)
{
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const MeasSet s = random_set(rng);
        EXPECT_NEAR(s.measure(), grid_measure(s), 2.0 * static_cast<double>(s.intervals().size()) / (1 << 18));
    }
}
