#include <gtest/gtest.h>

#include <random>

#include "circdyn/io.hpp"
#include "circdyn/wicked.hpp"
#include "support.hpp"

using namespace circdyn;
using io::Json;

namespace {

Rational r(long a, long b) { return rational(a, b); }

template <class T, class F>
T round_trip(const T& value, F load)
{
    return load(Json::parse(io::to_json(value).dump()));
}

}  // namespace

TEST(Io, RationalsAsText)
{
    EXPECT_EQ(io::to_json(r(-3, 4)), "-3/4");
    EXPECT_EQ(io::rational_from(Json("6/8")), r(3, 4));
    EXPECT_EQ(io::rational_from(Json(5)), 5);
    EXPECT_THROW(io::rational_from(Json("0.5")), InvalidInput);
    EXPECT_THROW(io::rational_from(Json(0.5)), InvalidInput);
    EXPECT_THROW(io::rational_from(Json("1/0")), InvalidInput);
}

TEST(Io, MapsRoundTrip)
{
    std::mt19937_64 rng(31);
    for (int t = 0; t < 10; ++t) {
        PLCircleMap f = testing_support::random_map(rng, 5, t % 3 - 1);
        EXPECT_EQ(round_trip(f, io::map_from), f);
    }
    EXPECT_THROW(io::map_from(Json::parse(R"({"type":"pl_map","breakpoints":["0","1/2"],"lift":["0","1"]})")), InvalidInput);
    EXPECT_THROW(io::map_from(Json::parse(R"({"type":"measure","breakpoints":["0","1"],"lift":["0","1"]})")), InvalidInput);
    EXPECT_THROW(io::map_from(Json::parse(R"({"breakpoints":["0","1"]})")), InvalidInput);
}

TEST(Io, MeasuresRoundTrip)
{
    std::mt19937_64 rng(32);
    for (int t = 0; t < 6; ++t) {
        CircleMeasure m = pushforward(testing_support::random_grid_map(rng, 4, 2), CircleMeasure::lebesgue());
        m = pushforward(testing_support::random_grid_map(rng, 3, 1), m);
        EXPECT_EQ(round_trip(m, io::measure_from), m);
    }
    EXPECT_EQ(io::measure_from(Json::parse(R"({"kind":"lebesgue"})")), CircleMeasure::lebesgue());
    EXPECT_EQ(io::measure_from(Json::parse(R"({"kind":"dirac","at":"1/3"})")), CircleMeasure::dirac(CirclePoint(r(1, 3))));
    EXPECT_THROW(io::measure_from(Json::parse(R"({"atoms":[{"at":"0","mass":"1/2"}],"pieces":[]})")), InvalidInput);
}

TEST(Io, SpecsRoundTrip)
{
    CylinderSpec b = CylinderSpec::bernoulli({r(2, 3), r(1, 3)}, 3);
    EXPECT_EQ(round_trip(b, io::spec_from), b);
    EXPECT_EQ(io::spec_from(Json::parse(R"({"kind":"bernoulli","probs":["2/3","1/3"],"level":3})")), b);
    EXPECT_EQ(io::spec_from(Json::parse(R"({"kind":"dirac0","ell":3,"level":2})")), CylinderSpec::dirac_at_zero(3, 2));
    EXPECT_THROW(io::spec_from(Json::parse(R"({"ell":2,"level":1,"values":["1/2","1/3"]})")), InvalidInput);
    EXPECT_EQ(io::spec_from(Json::parse(R"({"ell":2,"p":2,"values":{"00":"4/9","01":"2/9","10":"2/9","11":"1/9"}})")),
              CylinderSpec::bernoulli({r(2, 3), r(1, 3)}, 2));
    EXPECT_EQ(io::to_json(CylinderSpec::dirac_at_zero(2, 2))["values"]["00"], "1/1");
    EXPECT_THROW(io::spec_from(Json::parse(R"({"ell":2,"p":2,"values":{"00":"1/2","01":"1/2","10":"0"}})")), InvalidInput);
    EXPECT_THROW(io::spec_from(Json::parse(R"({"ell":2,"p":2,"values":{"00":"1","010":"0"}})")), InvalidInput);
}

TEST(Io, FamiliesRoundTrip)
{
    auto res = wicked_perturb(PLCircleMap::identity(), 2, CylinderSpec::dirac_at_zero(2, 2), r(1, 4), 6);
    ASSERT_TRUE(res.family.has_value());
    EXPECT_EQ(round_trip(*res.family, io::family_from), *res.family);
    std::mt19937_64 rng(33);
    ConsistentFamily f = family_from_homeo(testing_support::random_homeo(rng, 3), 3, 3);
    EXPECT_EQ(round_trip(f, io::family_from), f);
}

TEST(Io, ObservablesRoundTrip)
{
    Observable t = Observable::tent(r(7, 8), r(1, 4), 3);
    Observable back = round_trip(t, io::observable_from);
    EXPECT_EQ(back.breakpoints(), t.breakpoints());
    EXPECT_EQ(back.values(), t.values());
    Observable s = io::observable_from(Json::parse(R"({"kind":"tent","peak":"7/8","half_width":"1/4","height":3})"));
    EXPECT_EQ(s.values(), t.values());
}

TEST(Io, TrappingReportRoundTripStillVerifies)
{
    for (auto eps : {r(1, 2), r(1, 10)}) {
        auto res = shred(PLCircleMap::linear(2), eps);
        TrappingReport back = round_trip(res.report, io::report_from);
        EXPECT_EQ(back.regions.size(), res.report.regions.size());
        EXPECT_EQ(back.tau, res.report.tau);
        EXPECT_EQ(back.interiors, res.report.interiors);
        ShredVerdict v = verify_shredding(res.g, back);
        EXPECT_TRUE(v.all_pass());
        EXPECT_EQ(v.min_slack(), res.report.verdict->min_slack());
        EXPECT_EQ(io::to_json(back).dump(), io::to_json(res.report).dump());
    }
}

TEST(Io, DiagnosticsDocument)
{
    Json j = io::to_json(classify(PLCircleMap::identity()));
    EXPECT_EQ(j["labels"]["wholesome"]["status"], "witnessed");
    EXPECT_EQ(j["labels"]["wonderful"]["status"], "refuted");
    EXPECT_EQ(j["labels"]["wonderful"]["evidence"]["basin_cover"], "0/1");
}
