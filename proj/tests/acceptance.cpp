// Acceptance gate: one PASS/FAIL line per criterion. Tolerances and time limits are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "circdyn/circdyn.hpp"
#include "support.hpp"

using namespace circdyn;
using testing_support::eval_double;

namespace {

constexpr double kShredCaseSeconds = 5.0;    // criterion 1, per case
constexpr double kFigureSeconds = 1.0;       // criterion 2
constexpr double kWickedSeconds = 10.0;      // criterion 3
constexpr double kCompanionSeconds = 5.0;    // criterion 4
constexpr long kOraclePoints = 10000;        // criterion 6
constexpr long double kOracleDistance = 1e-6L;
constexpr long kMonteCarloSamples = 1000000;  // criterion 7
constexpr long kCdfGrid = 4000;
constexpr double kMonteCarloL1 = 5e-3;

Rational r(long a, long b) { return rational(a, b); }

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Collects failures; a criterion passes when nothing was recorded.
struct Check {
    std::vector<std::string> failures;
    std::ostringstream info;

    void expect(bool ok, const std::string& what)
    {
        if (!ok && failures.size() < 5) failures.push_back(what);
        if (!ok && failures.size() == 5) failures.push_back("...");
    }
};

PLCircleMap figure_three_map()
{
    return PLCircleMap({0, r(1, 10), r(3, 10), r(1, 2), r(7, 10), r(9, 10), 1},
                       {r(3, 10), r(1, 10), r(1, 10), r(1, 2), r(1, 2), r(1, 2), r(3, 10)});
}

/// Fixed points 0 (repelling) and 1/2 (attracting).
PLCircleMap attracting_half() { return PLCircleMap({0, r(1, 4), r(1, 2), r(3, 4), 1}, {0, r(3, 8), r(1, 2), r(5, 8), 1}); }

std::vector<Arc> complement(const std::vector<Arc>& a)
{
    std::vector<std::pair<Rational, Rational>> lifts;
    for (const auto& arc : a) lifts.emplace_back(arc.start().value(), arc.end_lift());
    std::vector<Arc> out;
    Rational cursor = 0;
    for (const auto& [s, e] : normalize_intervals(lifts)) {
        if (cursor < s) out.emplace_back(CirclePoint(cursor), Rational(s - cursor));
        cursor = e;
    }
    if (cursor < 1) out.emplace_back(CirclePoint(cursor), Rational(1 - cursor));
    return out;
}

long double circle_dist(long double a, long double b)
{
    long double d = std::fabs(a - b);
    d -= std::floor(d);
    return std::min(d, 1 - d);
}

// 1. Shredding soundness.
void shredding_soundness(Check& c)
{
    std::mt19937_64 rng(1001);
    std::vector<std::pair<std::string, PLCircleMap>> maps{{"identity", PLCircleMap::identity()},
                                                          {"E2", PLCircleMap::linear(2)},
                                                          {"random", testing_support::random_map(rng, 6, 1)}};
    Rational min_slack = 1;
    double slowest = 0;
    for (const auto& [name, f] : maps) {
        for (auto eps : {r(1, 2), r(1, 5), r(1, 10)}) {
            auto t0 = std::chrono::steady_clock::now();
            ShredResult res = shred(f, eps);
            ShredVerdict v = verify_shredding(res.g, res.report);
            Rational dist = c0_distance(f, res.g);
            double t = seconds_since(t0);
            slowest = std::max(slowest, t);
            std::string tag = name + " eps=" + to_string(eps);
            c.expect(v.all_pass(), tag + ": verdict fails");
            c.expect(v.min_slack() > 0, tag + ": slack not positive");
            c.expect(dist < eps, tag + ": c0 distance " + to_string(dist));
            c.expect(t < kShredCaseSeconds, tag + ": took " + std::to_string(t) + " s");
            min_slack = rmin(min_slack, v.min_slack());
        }
    }
    c.info << "9 cases, min slack " << to_string(min_slack) << ", slowest " << slowest << " s";
}

// 2. Figure 3: five cells, four subcells, two fixed cells of tau.
void figure_three(Check& c)
{
    auto t0 = std::chrono::steady_clock::now();
    ShredConfig cfg;
    cfg.cell_count = 5;
    cfg.subdivision_count = 4;
    ShredResult res = shred(figure_three_map(), r(7, 10), cfg);
    double t = seconds_since(t0);
    long fixed = 0;
    for (std::size_t i = 0; i < res.report.tau.size(); ++i)
        if (res.report.tau[i] == static_cast<long>(i)) ++fixed;
    c.expect(fixed == 2, "tau has " + std::to_string(fixed) + " fixed cells");
    c.expect(res.report.regions.size() == 8, std::to_string(res.report.regions.size()) + " regions");
    c.expect(res.report.verdict && res.report.verdict->all_pass(), "verdict fails");
    c.expect(t < kFigureSeconds, "took " + std::to_string(t) + " s");
    c.info << res.report.regions.size() << " regions, " << t << " s";
}

/// h'_* m has density g' where g = h'^{-1}.
CircleMeasure density_of(const PLCircleMap& g)
{
    std::vector<std::pair<Arc, Rational>> pieces;
    const auto& bp = g.breakpoints();
    for (std::size_t i = 0; i < g.piece_count(); ++i)
        pieces.emplace_back(Arc(CirclePoint(bp[i]), Rational(bp[i + 1] - bp[i])), g.slope(i));
    return CircleMeasure::from_parts({}, pieces);
}

// 3. Window equality of the wicked perturbation, checked along three routes.
void wicked_exactness(Check& c)
{
    auto t0 = std::chrono::steady_clock::now();
    const PLCircleMap h = PLCircleMap::identity();
    const Rational eps = r(1, 4);
    const long n = 8;
    for (const auto& target : {CylinderSpec::dirac_at_zero(2, 3), CylinderSpec::bernoulli({r(2, 3), r(1, 3)}, 2)}) {
        const int p = target.level();
        std::string tag = "p=" + std::to_string(p);
        WickedResult res = wicked_perturb(h, 2, target, eps, n);
        c.expect(res.n0 == 2, tag + ": n0 = " + std::to_string(res.n0));
        if (!res.family || !res.distance) {
            c.expect(false, tag + ": family not materialized");
            continue;
        }
        c.expect(*res.distance < eps, tag + ": c0 distance " + to_string(*res.distance));
        CircleMeasure mu = density_of(*res.inverse);
        PLCircleMap e2 = expanding_map(2);
        for (long k = 0; k < n; ++k) {
            if (k >= res.n0) {
                std::string at = tag + " k=" + std::to_string(k);
                c.expect(spec_distance(res.conjugator.cylinder(k, p), target) == 0, at + ": symbolic route nonzero");
                c.expect(spec_distance(family_cylinder_pushforward(*res.family, static_cast<int>(k), p), target) == 0,
                         at + ": family route nonzero");
                c.expect(spec_distance(cylinder_vector(mu, 2, p), target) == 0, at + ": push-forward route nonzero");
            }
            mu = pushforward(e2, mu);
        }
    }
    double t = seconds_since(t0);
    c.expect(t < kWickedSeconds, "took " + std::to_string(t) + " s");
    c.info << "Dirac p=3 and Bernoulli p=2, k in [2,7] zero on 3 routes, " << t << " s";
}

// 4. Rotation companions give the same conjugate, with ell - 1 fixed points.
void companion_structure(Check& c)
{
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1004);
    for (long ell : {2L, 3L, 4L}) {
        for (int t = 0; t < 5; ++t) {
            PLCircleMap h = testing_support::random_homeo(rng, 4);
            PLCircleMap f = conjugate(h, ell).f;
            auto comps = rotation_companions(h, ell);
            std::string tag = "ell=" + std::to_string(ell) + " #" + std::to_string(t);
            c.expect(static_cast<long>(comps.size()) == ell - 1, tag + ": companion count");
            for (const auto& hc : comps) c.expect(conjugate(hc, ell).f == f, tag + ": companion conjugate differs");
            FixedPointSet fp = fixed_points(f);
            c.expect(fp.arcs.empty() && static_cast<long>(fp.points.size()) == ell - 1,
                     tag + ": " + std::to_string(fp.points.size()) + " fixed points");
            c.expect(f.degree() == ell, tag + ": degree");
        }
    }
    double t = seconds_since(t0);
    c.expect(t < kCompanionSeconds, "took " + std::to_string(t) + " s");
    c.info << "15 homeos, " << t << " s";
}

// 5. Maps of different degree are exactly 1/2 apart.
void degree_separation(Check& c)
{
    c.expect(c0_distance(PLCircleMap::linear(2), PLCircleMap::linear(3)) == r(1, 2), "E2 vs E3");
    std::mt19937_64 rng(1005);
    for (int t = 0; t < 10; ++t) {
        PLCircleMap a = testing_support::random_map(rng, 5, 2), b = testing_support::random_map(rng, 4, 3);
        Rational d = c0_distance(a, b);
        c.expect(d == r(1, 2), "random pair " + std::to_string(t) + ": " + to_string(d));
    }
    c.info << "11 pairs at exactly 1/2";
}

// 6. Basin decomposition of homeos with transversal fixed points, against orbit simulation.
void basin_decomposition_check(Check& c)
{
    std::mt19937_64 rng(1006);
    long sampled = 0;
    for (int t = 0; t < 10; ++t) {
        PLCircleMap h = testing_support::random_morse_smale(rng, static_cast<std::size_t>(1 + t % 3));
        std::string tag = "homeo " + std::to_string(t);
        BasinDecomposition b = basin_decomposition(h, 12);
        for (const auto& comp : b.periodic) c.expect(comp.transversal && !comp.is_arc(), tag + ": non-transversal component");
        Rational total = b.periodic_measure;
        for (const auto& pm : b.physical) {
            c.expect(pm.measure == dirac_periodic(h, pm.representative, b.rotation.period), tag + ": not a periodic Dirac measure");
            for (const auto& arc : pm.basin) c.expect(arc.length() > 0, tag + ": empty basin arc");
            c.expect(detail::open_union_measure(pm.basin) == pm.basin_measure, tag + ": basin arcs overlap");
            total += pm.basin_measure;
        }
        c.expect(total == 1, tag + ": basins plus m(Per) = " + to_string(total));

        const long q = b.rotation.period;
        for (long i = 0; i < kOraclePoints; ++i) {
            Rational x = r(2 * i + 1, 2 * kOraclePoints);
            CirclePoint px(x);
            long want = -1;
            for (std::size_t m = 0; m < b.physical.size() && want < 0; ++m)
                for (const auto& arc : b.physical[m].basin)
                    if (arc.contains(px) && !(arc.start() == px)) want = static_cast<long>(m);
            if (want < 0) continue;
            long double y = x.get_d();
            for (long s = 0; s < 400 * q; ++s) y = eval_double(h, y);
            long best = -1;
            long double best_d = 1;
            for (std::size_t m = 0; m < b.physical.size(); ++m)
                for (const auto& atom : b.physical[m].measure.atoms()) {
                    long double d = circle_dist(y, atom.at.value().get_d());
                    if (d < best_d) {
                        best_d = d;
                        best = static_cast<long>(m);
                    }
                }
            ++sampled;
            c.expect(best == want && best_d < kOracleDistance, tag + ": simulation disagrees at " + to_string(x));
        }
    }
    c.info << "10 homeos, " << sampled << " sampled points agree";
}

// 7. Exact push-forward against a Monte Carlo CDF; E_ell preserves Lebesgue.
void pushforward_oracle(Check& c)
{
    std::mt19937_64 rng(1007);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double worst = 0;
    for (int t = 0; t < 5; ++t) {
        PLCircleMap f = testing_support::random_map(rng, 5, t % 3);
        CircleMeasure mu = pushforward(f, CircleMeasure::lebesgue());
        std::vector<double> ys(kMonteCarloSamples);
        for (auto& y : ys) {
            long double v = eval_double(f, unif(rng));
            y = static_cast<double>(v - std::floor(v));
        }
        std::sort(ys.begin(), ys.end());
        std::vector<Rational> xs;
        for (long i = 0; i < kCdfGrid; ++i) xs.push_back(r(2 * i + 1, 2 * kCdfGrid));
        auto exact = mu.cdf_many(xs);
        double l1 = 0;
        for (long i = 0; i < kCdfGrid; ++i) {
            double x = xs[static_cast<std::size_t>(i)].get_d();
            double emp = static_cast<double>(std::lower_bound(ys.begin(), ys.end(), x) - ys.begin()) / kMonteCarloSamples;
            l1 += std::fabs(emp - exact[static_cast<std::size_t>(i)].get_d()) / kCdfGrid;
        }
        worst = std::max(worst, l1);
        c.expect(l1 < kMonteCarloL1, "map " + std::to_string(t) + ": L1 " + std::to_string(l1));
    }
    for (long ell : {2L, 3L, 4L})
        c.expect(pushforward(expanding_map(ell), CircleMeasure::lebesgue()) == CircleMeasure::lebesgue(),
                 "E" + std::to_string(ell) + " moves Lebesgue");
    c.info << "worst L1 " << worst << ", Lebesgue invariant under E2, E3, E4";
}

// 8. Finite Birkhoff averages stay in the cycle-set bracket.
void birkhoff_bracket(Check& c)
{
    std::mt19937_64 rng(1008);
    std::vector<std::pair<PLCircleMap, Rational>> cases{{PLCircleMap::linear(2), r(1, 10)},
                                                         {PLCircleMap::identity(), r(1, 5)},
                                                         {testing_support::random_map(rng, 6, 1), r(1, 5)}};
    long checked = 0;
    for (const auto& [f, eps] : cases) {
        auto [g, rep] = shred(f, eps);
        for (const auto& phi : WProtocol::default_battery())
            for (const auto& region : rep.regions)
                for (long cell : rep.orbits[static_cast<std::size_t>(region.orbit)]) {
                    CirclePoint x = rep.anchors[static_cast<std::size_t>(cell)][static_cast<std::size_t>(region.sub)];
                    for (long n : {100L, 1000L, 10000L}) {
                        BirkhoffBracket b = birkhoff_gap_bound(g, rep, phi, x, n);
                        ++checked;
                        c.expect(b.contained, "average " + to_string(b.average) + " outside [" + to_string(b.lower) + ", " +
                                                  to_string(b.upper) + "]");
                    }
                }
    }
    c.info << checked << " (observable, point, n) triples inside the bracket";
}

/// Labels gathered from every classification in criteria 9 and 10.
std::vector<std::pair<std::string, WDiagnostics>> g_classified;

// 9. Cesaro split identity; wicked evidence comes with wacky evidence.
void cesaro_split_and_wicked(Check& c)
{
    std::mt19937_64 rng(1009);
    CircleMeasure leb = CircleMeasure::lebesgue();
    for (int t = 0; t < 20; ++t) {
        PLCircleMap f = testing_support::random_grid_map(rng, 3, t % 3);
        std::vector<Arc> a;
        for (int k = 0; k <= t % 3; ++k)
            a.emplace_back(CirclePoint(testing_support::random_unit(rng, 97)), Rational(testing_support::random_unit(rng, 97) / 4));
        Rational ma = leb.measure_of(a);
        long n = 1 + t % 10;
        CircleMeasure whole = cesaro(f, leb, n);
        CircleMeasure split = CircleMeasure::combine(
            {{Rational(1 - ma), cesaro(f, restrict_normalize(leb, complement(a)), n)}, {ma, cesaro(f, restrict_normalize(leb, a), n)}});
        c.expect(whole == split, "split instance " + std::to_string(t) + " differs");
    }
    auto t0 = std::chrono::steady_clock::now();
    WickedResult w = wicked_perturb(PLCircleMap::identity(), 2, CylinderSpec::dirac_at_zero(2, 3), r(1, 2), 101);
    ClassifyInput in;
    in.conjugator = w.conjugator;
    WDiagnostics d = classify(in);
    c.expect(d.wicked.status == Verdict::Witnessed, "wicked evidence missing on the wicked perturbation");
    c.expect(d.wacky.status == Verdict::Witnessed, "wacky evidence missing on the wicked perturbation");
    g_classified.emplace_back("wicked perturbation", d);
    c.info << "20 split identities exact; wicked perturbation wicked+wacky in " << seconds_since(t0) << " s";
}

// 10. Classifier sanity.
void classifier_sanity(Check& c)
{
    WDiagnostics id = classify(PLCircleMap::identity());
    c.expect(id.wholesome.status == Verdict::Witnessed, "identity: wholesome not witnessed");
    c.expect(id.wonderful.status == Verdict::Refuted, "identity: wonderful not refuted");
    g_classified.emplace_back("identity", id);

    PLCircleMap att = attracting_half();
    WDiagnostics ad = classify(att);
    BasinDecomposition b = basin_decomposition(att, 12);
    c.expect(ad.wonderful.status == Verdict::Witnessed, "attracting homeo: wonderful not witnessed");
    c.expect(b.physical.size() == 1 && b.physical[0].basin_measure == 1, "attracting homeo: basin measure is not 1");
    g_classified.emplace_back("attracting homeo", ad);

    const Rational eps = r(1, 10);
    auto [g, rep] = shred(PLCircleMap::linear(2), eps);
    SingularityWitness w = singularity_witness(g, rep);
    Rational largest = 0;
    for (const auto& reg : rep.regions) largest = rmax(largest, detail::open_union_measure(reg.components));
    Rational bound = largest + (1 - w.measure);
    c.expect(w.measure > 1 - eps, "shredded: m(V) = " + to_string(w.measure));
    c.expect(w.image_measure < eps, "shredded: m(g(V)) = " + to_string(w.image_measure));
    c.expect(bound < 2 * eps, "shredded: basin bound " + to_string(bound));
    ClassifyInput in;
    in.map = g;
    in.trapping = rep;
    WDiagnostics sd = classify(in);
    c.expect(sd.weird.status == Verdict::Witnessed, "shredded: weird not witnessed");
    g_classified.emplace_back("shredded E2", sd);

    std::mt19937_64 rng(1010);
    g_classified.emplace_back("rotation 2/5", classify(PLCircleMap::rotation(r(2, 5))));
    g_classified.emplace_back("Morse-Smale", classify(testing_support::random_morse_smale(rng, 2)));
    g_classified.emplace_back("random degree-2 map", classify(testing_support::random_grid_map(rng, 4, 2)));
    for (const auto& [name, d] : g_classified)
        c.expect(!(d.wholesome.status == Verdict::Witnessed && d.wacky.status == Verdict::Witnessed),
                 name + ": wholesome and wacky both witnessed");
    c.info << "m(V) = " << to_string(w.measure) << ", m(g(V)) = " << to_string(w.image_measure) << ", basin bound "
           << to_string(bound) << " < " << to_string(2 * eps) << "; " << g_classified.size()
           << " inputs without wholesome+wacky";
}

}  // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
        {"shredding soundness", shredding_soundness},
        {"figure 3 reproduction", figure_three},
        {"wicked window exactness", wicked_exactness},
        {"expanding conjugate structure", companion_structure},
        {"degree separation", degree_separation},
        {"basin decomposition", basin_decomposition_check},
        {"push-forward oracle", pushforward_oracle},
        {"Birkhoff bracket", birkhoff_bracket},
        {"Cesaro split and wicked implies wacky", cesaro_split_and_wicked},
        {"classifier sanity", classifier_sanity},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check c;
        try {
            criteria[i].second(c);
        } catch (const std::exception& e) {
            c.failures.push_back(std::string("exception: ") + e.what());
        }
        bool pass = c.failures.empty();
        if (!pass) ++failed;
        std::cout << "criterion " << i + 1 << ": " << (pass ? "PASS" : "FAIL") << "  " << criteria[i].first << " -- "
                  << c.info.str() << '\n';
        for (const auto& f : c.failures) std::cout << "    " << f << '\n';
        std::cout.flush();
    }
    std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria fail") << '\n';
    return failed == 0 ? 0 : 1;
}
