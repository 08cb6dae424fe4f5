#include <gtest/gtest.h>

#include <random>

#include "circdyn/shredder.hpp"
#include "support.hpp"

using namespace circdyn;

namespace {

PLCircleMap figure_map()
{
    return PLCircleMap({0, rational(1, 10), rational(3, 10), rational(1, 2), rational(7, 10), rational(9, 10), 1},
                       {rational(3, 10), rational(1, 10), rational(1, 10), rational(1, 2), rational(1, 2),
                        rational(1, 2), rational(3, 10)});
}

/// Adds a random offset below `bound` to every lift value (breakpoints kept), so c0 distance < bound.
PLCircleMap perturb(const PLCircleMap& g, const Rational& bound, std::mt19937_64& rng)
{
    std::uniform_int_distribution<long> d(-999, 999);
    std::vector<Rational> lift = g.lift_values();
    for (std::size_t i = 0; i + 1 < lift.size(); ++i) lift[i] += bound * rational(d(rng), 1000);
    lift.back() = lift.front() + Rational(g.degree());
    return PLCircleMap(g.breakpoints(), lift);
}

}  // namespace

TEST(Shredder, PeriodicOrbitsOfIndexMap)
{
    auto orbits = periodic_orbits({0, 0, 2, 2, 2});
    ASSERT_EQ(orbits.size(), 2u);
    EXPECT_EQ(orbits[0], std::vector<long>{0});
    EXPECT_EQ(orbits[1], std::vector<long>{2});
    auto cyc = periodic_orbits({1, 2, 0, 0});
    ASSERT_EQ(cyc.size(), 1u);
    EXPECT_EQ(cyc[0], (std::vector<long>{0, 1, 2}));
}

TEST(Shredder, FigureThreeHasEightRegions)
{
    ShredConfig cfg;
    cfg.cell_count = 5;
    cfg.subdivision_count = 4;
    auto [g, rep] = shred(figure_map(), rational(7, 10), cfg);
    EXPECT_EQ(rep.tau, (std::vector<long>{0, 0, 2, 2, 2}));
    EXPECT_EQ(rep.orbits.size(), 2u);
    EXPECT_EQ(rep.regions.size(), 8u);
    ASSERT_TRUE(rep.verdict.has_value());
    EXPECT_TRUE(rep.verdict->all_pass());
}

TEST(Shredder, IdentityMapGivesSingleCellRegions)
{
    Rational eps(1, 5);
    auto [g, rep] = shred(PLCircleMap::identity(), eps);
    for (long i = 0; i < rep.cell_count; ++i) EXPECT_EQ(rep.tau[static_cast<std::size_t>(i)], i);
    EXPECT_EQ(static_cast<long>(rep.regions.size()), rep.cell_count * rep.sub_count);
    for (const auto& r : rep.regions) {
        EXPECT_EQ(r.components.size(), 1u);
        EXPECT_EQ(r.cycle.size(), 1u);
        EXPECT_EQ(r.cycle[0], r.components[0]);
    }
    EXPECT_TRUE(rep.verdict->all_pass());
    EXPECT_LT(c0_distance(PLCircleMap::identity(), g), eps);
}

TEST(Shredder, ConstructionPropertiesOnExpandingMap)
{
    Rational eps(1, 10);
    PLCircleMap f = PLCircleMap::linear(2);
    auto [g, rep] = shred(f, eps);
    EXPECT_LT(c0_distance(f, g), eps);
    EXPECT_TRUE(rep.verdict->all_pass());
    EXPECT_GT(rep.verdict->min_slack(), 0);
    for (long i = 0; i < rep.cell_count; ++i)
        for (long j = 0; j < rep.sub_count; ++j) {
            const Arc& sub = rep.subcells[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            const Arc& in = rep.interiors[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            // g agrees with f on subcell boundaries, is constant on the closed interior at the anchor.
            EXPECT_EQ(g(sub.start()), f(sub.start()));
            CirclePoint p = rep.anchors[static_cast<std::size_t>(rep.tau[static_cast<std::size_t>(i)])][static_cast<std::size_t>(j)];
            EXPECT_EQ(g(in.start()), p);
            EXPECT_EQ(g(CirclePoint::wrap(in.end_lift())), p);
            EXPECT_TRUE(in.contains(rep.anchors[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]));
        }
    EXPECT_EQ(static_cast<long>(rep.regions.size()), static_cast<long>(rep.orbits.size()) * rep.sub_count);
}

TEST(Shredder, SoundOnRandomMaps)
{
    std::mt19937_64 rng(89);
    for (int trial = 0; trial < 4; ++trial) {
        PLCircleMap f = testing_support::random_grid_map(rng, 5, trial % 3, 8);
        for (Rational eps : {rational(1, 2), rational(1, 5)}) {
            auto [g, rep] = shred(f, eps);
            EXPECT_TRUE(rep.verdict->all_pass());
            EXPECT_LT(c0_distance(f, g), eps);
        }
    }
}

TEST(Shredder, InfeasibleFineness)
{
    ShredConfig cfg;
    cfg.cell_count = 3;
    try {
        shred(PLCircleMap::linear(2), rational(1, 10), cfg);
        FAIL() << "expected infeasibility";
    } catch (const ShredInfeasible& e) {
        EXPECT_EQ(e.minimal_cells(), 31);
    }
    ShredConfig few;
    few.subdivision_count = 2;
    EXPECT_THROW(shred(PLCircleMap::identity(), rational(1, 5), few), InvalidInput);
}

TEST(Shredder, TauOverrideIsValidated)
{
    ShredConfig cfg;
    cfg.cell_count = 5;
    cfg.subdivision_count = 4;
    cfg.tau = std::vector<long>{0, 0, 2, 2, 2};
    EXPECT_NO_THROW(shred(figure_map(), rational(7, 10), cfg));
    cfg.tau = std::vector<long>{4, 0, 2, 2, 2};  // f(R_0) sits in [1/10, 3/10]
    EXPECT_THROW(shred(figure_map(), rational(7, 10), cfg), InvalidInput);
}

TEST(Shredder, VerifierRejectsIdentity)
{
    auto [g, rep] = shred(PLCircleMap::linear(2), rational(1, 5));
    ShredVerdict v = verify_shredding(PLCircleMap::identity(), rep);
    EXPECT_FALSE(v.items[3].pass);
    EXPECT_FALSE(v.all_pass());
    EXPECT_THROW(singularity_witness(PLCircleMap::identity(), rep), VerificationFailure);
}

TEST(Shredder, HandBuiltTrappingArc)
{
    // Contraction toward 1/2 on [1/4, 3/4].
    PLCircleMap g({0, rational(1, 4), rational(3, 4), 1}, {0, rational(3, 8), rational(5, 8), 1});
    TrappingReport rep;
    rep.eps = rational(3, 4);
    rep.cell_count = 1;
    TrappingRegion r;
    r.components = {Arc(CirclePoint(rational(1, 4)), rational(1, 2))};
    r.cycle = {Arc(CirclePoint(rational(3, 8)), rational(1, 4))};
    rep.regions = {r};
    ShredVerdict v = verify_shredding(g, rep);
    EXPECT_TRUE(v.items[0].pass);
    EXPECT_EQ(v.items[0].slack, rational(1, 8));
}

TEST(Shredder, StabilityUnderSmallPerturbations)
{
    std::mt19937_64 rng(97);
    auto [g, rep] = shred(PLCircleMap::linear(2), rational(1, 5));
    Rational slack = rep.verdict->items[0].slack;
    ASSERT_GT(slack, 0);
    for (int k = 0; k < 3; ++k) {
        PLCircleMap gp = perturb(g, slack / 2, rng);
        EXPECT_LT(c0_distance(g, gp), slack / 2);
        EXPECT_TRUE(verify_shredding(gp, rep).items[0].pass);
    }
}

TEST(Shredder, SingularityWitness)
{
    Rational eps(1, 10);
    auto [g, rep] = shred(PLCircleMap::linear(2), eps);
    SingularityWitness w = singularity_witness(g, rep);
    EXPECT_GT(w.measure, 1 - eps);
    EXPECT_LT(w.image_measure, eps);
    // Nested scales 1/n^2: the image measures are summable below the scales.
    Rational lhs = 0, rhs = 0;
    for (long n = 2; n <= 5; ++n) {
        Rational e(1, n * n);
        auto res = shred(PLCircleMap::linear(2), e);
        lhs += singularity_witness(res.g, res.report).image_measure;
        rhs += e;
    }
    EXPECT_LT(lhs, rhs);
}

TEST(Shredder, BirkhoffBracket)
{
    auto [g, rep] = shred(PLCircleMap::linear(2), rational(1, 10));
    Observable c = Observable::constant(rational(2, 3));
    const auto& region = rep.regions.front();
    CirclePoint anchor = rep.anchors[static_cast<std::size_t>(region.cells.empty() ? 0 : rep.orbits[0][0])][0];
    BirkhoffBracket cb = birkhoff_gap_bound(g, rep, c, anchor, 17);
    EXPECT_EQ(cb.gamma, rational(2, 3));
    EXPECT_EQ(cb.average, rational(2, 3));
    EXPECT_TRUE(cb.contained);

    for (long i = 0; i < 8; ++i) {
        Observable tent = Observable::tent(rational(i, 8), rational(1, 8));
        for (const auto& r : rep.regions) {
            CirclePoint x = rep.anchors[static_cast<std::size_t>(rep.orbits[static_cast<std::size_t>(r.orbit)][0])]
                                       [static_cast<std::size_t>(r.sub)];
            BirkhoffBracket b = birkhoff_gap_bound(g, rep, tent, x, 1000);
            EXPECT_TRUE(b.contained);
        }
    }
    EXPECT_THROW(birkhoff_gap_bound(g, rep, c, CirclePoint(rep.subcells[0][0].start()), 5), InvalidInput);
}

TEST(Shredder, FixedPointAverageIsConstant)
{
    auto [g, rep] = shred(PLCircleMap::identity(), rational(1, 2));
    Observable tent = Observable::tent(rational(1, 3), rational(1, 4));
    CirclePoint p = rep.anchors[0][0];
    ASSERT_EQ(g(p), p);
    for (long n : {1L, 7L, 100L}) {
        BirkhoffBracket b = birkhoff_gap_bound(g, rep, tent, p, n);
        EXPECT_EQ(b.average, tent(p));
        EXPECT_EQ(b.gamma, tent(p));
    }
}

TEST(Shredder, OrbitSumMatchesDirectSum)
{
    std::mt19937_64 rng(101);
    PLCircleMap f = testing_support::random_grid_map(rng, 4, 2, 6);
    Observable phi = Observable::tent(rational(1, 3), rational(1, 5), 2);
    CirclePoint x(rational(1, 7));
    Rational direct = 0;
    CirclePoint y = x;
    for (int m = 0; m < 200; ++m) {
        direct += phi(y);
        y = f(y);
    }
    EXPECT_EQ(orbit_sum(f, phi, x, 200), direct);
}
