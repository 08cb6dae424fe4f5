#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "circdyn/circle.hpp"
#include "circdyn/errors.hpp"
#include "circdyn/measure.hpp"
#include "circdyn/pl_map.hpp"
#include "circdyn/rational.hpp"
#include "circdyn/shredder.hpp"
#include "circdyn/wicked.hpp"

namespace circdyn {

struct RotationNumber {
    bool exact = false;
    Rational value;   // r/q mod 1 when exact
    long period = 0;  // q when exact
    Rational lower;   // bracket when not exact; equal to value otherwise
    Rational upper;
};

/// Rotation number of the lift with F(0) in [0, 1). Searches the minimal q with
/// F^q(x) = x + r solvable; F^q - id is PL, so solvability is read off its range.
inline RotationNumber rotation_number(const PLCircleMap& h, long max_period,
                                      std::size_t max_breakpoints = kDefaultMaxBreakpoints)
{
    if (!h.is_orientation_preserving()) throw InvalidInput("rotation_number: h must be an orientation-preserving homeomorphism");
    if (max_period < 1) throw InvalidInput("rotation_number: max_period must be >= 1");
    RotationNumber out;
    PLCircleMap hq = h;
    for (long q = 1; q <= max_period; ++q) {
        if (q > 1) hq = compose(h, hq, max_breakpoints);
        FixedPointSet fix = fixed_points(hq);
        if (fix.empty()) continue;
        Rational x = fix.points.empty() ? fix.arcs.front().start().value() : fix.points.front().point.value();
        Rational y = x;
        for (long i = 0; i < q; ++i) y = h.lift(y);
        Rational r = y - x;
        out.exact = true;
        out.value = frac(Rational(r / Rational(q)));
        out.period = q;
        out.lower = out.upper = out.value;
        return out;
    }
    // |F^Q(0) - Q rho| < 1.
    Rational y = 0;
    for (long i = 0; i < max_period; ++i) y = h.lift(y);
    out.lower = (y - 1) / Rational(max_period);
    out.upper = (y + 1) / Rational(max_period);
    return out;
}

struct PeriodicComponent {
    Arc arc;  // zero length for an isolated point
    long period = 1;
    bool transversal = false;
    bool is_arc() const { return !arc.empty(); }
};

struct ComplementaryInterval {
    Arc arc;             // open arc between consecutive periodic components
    bool attracts_right;  // orbits under h^period move toward the right endpoint
    CirclePoint limit;   // the endpoint they converge to
};

struct PhysicalMeasure {
    CircleMeasure measure;
    CirclePoint representative;  // least point of the periodic orbit
    std::vector<Arc> basin;      // open arcs
    Rational basin_measure;
};

struct BasinDecomposition {
    RotationNumber rotation;
    std::vector<PeriodicComponent> periodic;
    std::vector<ComplementaryInterval> intervals;
    std::vector<PhysicalMeasure> physical;
    Rational periodic_measure;  // m(Per)

    Rational covered() const
    {
        Rational c = 0;
        for (const auto& p : physical) c += p.basin_measure;
        return c;
    }
};

/// Periodic points of h and the basin of each periodic Dirac measure. On each
/// complementary interval h^period - id has constant sign, so every orbit
/// converges monotonically to one endpoint.
inline BasinDecomposition basin_decomposition(const PLCircleMap& h, long max_period,
                                              std::size_t max_breakpoints = kDefaultMaxBreakpoints)
{
    BasinDecomposition out;
    out.rotation = rotation_number(h, max_period, max_breakpoints);
    if (!out.rotation.exact)
        throw InvalidInput("basin_decomposition: no periodic orbit up to period " + std::to_string(max_period) +
                           "; rotation number in [" + to_string(out.rotation.lower) + ", " + to_string(out.rotation.upper) + "]");
    const long q = out.rotation.period;
    PLCircleMap hq = iterate(h, q, max_breakpoints);
    FixedPointSet fix = fixed_points(hq);
    for (const auto& p : fix.points) out.periodic.push_back({Arc(p.point, 0), q, p.transversal});
    for (const auto& a : fix.arcs) out.periodic.push_back({a, q, false});
    std::sort(out.periodic.begin(), out.periodic.end(),
              [](const PeriodicComponent& a, const PeriodicComponent& b) { return a.arc.start().value() < b.arc.start().value(); });
    out.periodic_measure = fix.arc_measure();
    if (out.periodic_measure == 1) return out;

    std::map<Rational, std::size_t> by_orbit;  // least orbit point -> index in physical
    const std::size_t n = out.periodic.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Arc& cur = out.periodic[i].arc;
        const Arc& nxt = out.periodic[(i + 1) % n].arc;
        Rational a = cur.end_lift();
        Rational b = nxt.start().value();
        while (b <= a) b += 1;
        Rational r = hq.lift(a) - a;
        Rational mid = (a + b) / 2;
        int s = sign(Rational(hq.lift(mid) - mid - r));
        if (s == 0) throw VerificationFailure("basin_decomposition: periodic point missed inside a complementary interval");
        ComplementaryInterval ci{Arc(CirclePoint::wrap(a), Rational(b - a)), s > 0, s > 0 ? CirclePoint::wrap(b) : CirclePoint::wrap(a)};
        CirclePoint least = ci.limit, x = ci.limit;
        for (long j = 1; j < q; ++j) {
            x = h(x);
            if (x.value() < least.value()) least = x;
        }
        auto [it, fresh] = by_orbit.emplace(least.value(), out.physical.size());
        if (fresh) out.physical.push_back({dirac_periodic(h, least, q), least, {}, Rational(0)});
        PhysicalMeasure& pm = out.physical[it->second];
        pm.basin.push_back(ci.arc);
        pm.basin_measure += ci.arc.length();
        out.intervals.push_back(std::move(ci));
    }
    if (out.covered() + out.periodic_measure != 1)
        throw VerificationFailure("basin_decomposition: basins and periodic set do not add up to 1");
    return out;
}

inline Rational birkhoff_average(const PLCircleMap& f, const CirclePoint& x, const Observable& phi, long n)
{
    if (n < 1) throw InvalidInput("birkhoff_average: n must be >= 1");
    return orbit_sum(f, phi, x, n) / Rational(n);
}

inline Rational birkhoff_gap(const PLCircleMap& f, const CirclePoint& x, const Observable& phi, const std::vector<long>& horizons)
{
    if (horizons.empty()) throw InvalidInput("birkhoff_gap: no horizons");
    std::optional<Rational> lo, hi;
    for (long n : horizons) {
        Rational a = birkhoff_average(f, x, phi, n);
        if (!lo || a < *lo) lo = a;
        if (!hi || a > *hi) hi = a;
    }
    return *hi - *lo;
}

namespace detail {

/// Birkhoff averages of several observables at several horizons along the
/// orbit state_{m+1} = step(state_m), reading observables through value(state).
/// Exact repetition of the state is detected and the tail summed in closed form.
/// Returns nullopt when a state outgrows max_bits.
template <class Step, class Value>
std::optional<std::vector<std::vector<Rational>>> horizon_averages(Step step, Value value, Rational state,
                                                                   const std::vector<Observable>& obs,
                                                                   const std::vector<long>& horizons, std::size_t max_bits)
{
    long last = *std::max_element(horizons.begin(), horizons.end());
    std::vector<std::vector<Rational>> prefix(obs.size(), std::vector<Rational>{Rational(0)});
    std::map<Rational, long> seen;
    long cycle_start = -1, period = 0;
    for (long m = 0; m < last; ++m) {
        if (mpz_sizeinbase(state.get_den_mpz_t(), 2) > max_bits) return std::nullopt;
        auto [it, fresh] = seen.emplace(state, m);
        if (!fresh) {
            cycle_start = it->second;
            period = m - cycle_start;
            break;
        }
        CirclePoint pt = value(state);
        for (std::size_t i = 0; i < obs.size(); ++i) prefix[i].push_back(prefix[i].back() + obs[i](pt));
        state = step(state);
    }
    auto sum_to = [&](std::size_t i, long n) -> Rational {
        const auto& p = prefix[i];
        if (n < static_cast<long>(p.size())) return p[static_cast<std::size_t>(n)];
        long s = cycle_start, m = s + period;
        long full = (n - s) / period, rest = (n - s) % period;
        Rational cyc = p[static_cast<std::size_t>(m)] - p[static_cast<std::size_t>(s)];
        return p[static_cast<std::size_t>(s)] + Rational(full) * cyc + (p[static_cast<std::size_t>(s + rest)] - p[static_cast<std::size_t>(s)]);
    };
    std::vector<std::vector<Rational>> out(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i)
        for (long n : horizons) out[i].push_back(sum_to(i, n) / Rational(n));
    return out;
}

}  // namespace detail

enum class Verdict { Witnessed, Refuted, Inconclusive };

inline std::string verdict_name(Verdict v)
{
    switch (v) {
    case Verdict::Witnessed: return "witnessed";
    case Verdict::Refuted: return "refuted";
    default: return "inconclusive";
    }
}

struct NamedSpec {
    std::string name;
    CylinderSpec spec;
};

struct WProtocol {
    long grid_size = 1000;                    // points (2j + 1) / (2 grid_size)
    std::vector<long> horizons{100, 1000, 10000};
    std::vector<Observable> observables;      // empty: default tent battery
    Rational tol{1, 100};
    Rational gap_threshold{1, 20};
    long max_period = 12;
    int ell = 2;                              // cylinder alphabet for Cesaro specs
    int level = 3;                            // cylinder level for Cesaro specs
    std::vector<NamedSpec> declared;          // empty: Lebesgue, Dirac at 0, Bernoulli(2/3, 1/3)
    std::size_t max_pieces = 2000;            // complexity cap for exact Cesaro push-forwards
    std::size_t max_work = 50000;             // parts processed over all Cesaro steps
    std::size_t max_bits = 1u << 10;          // denominator size cap for exact orbits and push-forwards

    /// 8 unit tents at peaks i/8 with half-width 1/8.
    static std::vector<Observable> default_battery()
    {
        std::vector<Observable> out;
        for (int i = 0; i < 8; ++i) out.push_back(Observable::tent(rational(i, 8), Rational(1, 8)));
        return out;
    }

    std::vector<Observable> battery() const { return observables.empty() ? default_battery() : observables; }

    std::vector<NamedSpec> specs() const
    {
        if (!declared.empty()) return declared;
        std::vector<NamedSpec> out{{"lebesgue", CylinderSpec::lebesgue(ell, level)},
                                   {"dirac0", CylinderSpec::dirac_at_zero(ell, level)}};
        if (ell == 2) out.push_back({"bernoulli(2/3,1/3)", CylinderSpec::bernoulli({Rational(2, 3), Rational(1, 3)}, level)});
        return out;
    }

    void validate() const
    {
        if (grid_size < 1) throw InvalidInput("protocol: grid size must be >= 1");
        if (horizons.empty()) throw InvalidInput("protocol: no horizons");
        for (long n : horizons)
            if (n < 1) throw InvalidInput("protocol: horizons must be >= 1");
        if (!(tol > 0 && tol < Rational(1, 2))) throw InvalidInput("protocol: tol must lie in (0, 1/2)");
        if (!(gap_threshold > tol)) throw InvalidInput("protocol: gap threshold must exceed tol");
        if (max_period < 1) throw InvalidInput("protocol: max period must be >= 1");
        for (const auto& s : specs())
            if (!s.spec.is_invariant()) throw InvalidInput("protocol: declared spec " + s.name + " is not invariant");
    }
};

struct LabelVerdict {
    Verdict status = Verdict::Inconclusive;
    std::vector<std::pair<std::string, std::string>> evidence;  // exact numbers as text

    void note(std::string key, std::string value) { evidence.emplace_back(std::move(key), std::move(value)); }
};

struct WDiagnostics {
    LabelVerdict wonderful, wholesome, weird, wacky, wicked;
    std::vector<Rational> grid;
    std::vector<std::optional<Rational>> gaps;  // per grid point; nullopt when the orbit outgrew the cap

    std::vector<std::pair<std::string, const LabelVerdict*>> labels() const
    {
        return {{"wonderful", &wonderful}, {"wholesome", &wholesome}, {"weird", &weird}, {"wacky", &wacky}, {"wicked", &wicked}};
    }
};

/// The map to classify plus optional construction records: a trapping report
/// for shredded maps, a staged conjugator for conjugates of E_ell. With a
/// conjugator, f = g o E o h' and orbits are followed in the conjugate coordinate.
struct ClassifyInput {
    std::optional<PLCircleMap> map;
    std::optional<TrappingReport> trapping;
    std::optional<StagedConjugator> conjugator;
};

inline WDiagnostics classify(const ClassifyInput& input, const WProtocol& protocol = {})
{
    protocol.validate();
    if (!input.map && !input.conjugator) throw InvalidInput("classify: need a map or a conjugator");
    const auto battery = protocol.battery();
    const Rational need = 1 - protocol.tol;
    WDiagnostics d;

    // Wonderful: exact basins for homeomorphisms. A successful decomposition
    // also proves that every point has a Birkhoff limit.
    bool limits_proved = false;
    if (input.map && input.map->is_homeomorphism()) {
        PLCircleMap h = input.map->is_orientation_preserving() ? *input.map : compose(*input.map, *input.map);
        if (!input.map->is_orientation_preserving()) d.wonderful.note("derived_from", "square of an orientation-reversing map");
        try {
            BasinDecomposition b = basin_decomposition(h, protocol.max_period);
            d.wonderful.note("rotation_number", to_string(b.rotation.value));
            d.wonderful.note("physical_measures", std::to_string(b.physical.size()));
            d.wonderful.note("basin_cover", to_string(b.covered()));
            d.wonderful.note("periodic_measure", to_string(b.periodic_measure));
            d.wonderful.status = b.covered() >= need ? Verdict::Witnessed : Verdict::Refuted;
            limits_proved = true;
        } catch (const InvalidInput& e) {
            d.wonderful.note("reason", e.what());
        } catch (const ResourceExhausted& e) {
            d.wonderful.note("reason", e.what());
        }
    } else {
        d.wonderful.note("reason", "basins are computed exactly for homeomorphisms only");
    }

    if (limits_proved) {
        d.wholesome.status = Verdict::Witnessed;
        d.wacky.status = Verdict::Refuted;
        d.wholesome.note("route", "every orbit converges to a periodic orbit");
        d.wacky.note("route", "every orbit converges to a periodic orbit");
    } else {
        // Orbit statistics on the grid.
        long ok_points = 0, small = 0, large = 0;
        for (long j = 0; j < protocol.grid_size; ++j) {
            Rational x = rational(2 * j + 1, 2 * protocol.grid_size);
            d.grid.push_back(x);
            std::optional<std::vector<std::vector<Rational>>> avgs;
            if (input.conjugator) {
                const StagedConjugator& c = *input.conjugator;
                const long ell = c.ell();
                Rational y = c.forward(CirclePoint(x)).value();
                avgs = detail::horizon_averages([ell](const Rational& z) { return frac(Rational(z * ell)); },
                                                [&c](const Rational& z) { return c.inverse(CirclePoint(z)); }, y, battery,
                                                protocol.horizons, protocol.max_bits);
            } else {
                const PLCircleMap& f = *input.map;
                avgs = detail::horizon_averages([&f](const Rational& z) { return f(CirclePoint(z)).value(); },
                                                [](const Rational& z) { return CirclePoint(z); }, x, battery,
                                                protocol.horizons, protocol.max_bits);
            }
            if (!avgs) {
                d.gaps.emplace_back();
                continue;
            }
            Rational gap = 0;
            for (const auto& row : *avgs) {
                auto [lo, hi] = std::minmax_element(row.begin(), row.end());
                gap = rmax(gap, Rational(*hi - *lo));
            }
            ++ok_points;
            if (gap < protocol.tol) ++small;
            if (gap > protocol.gap_threshold) ++large;
            d.gaps.push_back(gap);
        }
        const long total = protocol.grid_size;
        Rational frac_small = rational(small, total), frac_large = rational(large, total);
        for (auto* v : {&d.wholesome, &d.wacky}) {
            v->note("grid_points", std::to_string(total));
            v->note("exact_orbits", std::to_string(ok_points));
        }
        d.wholesome.note("fraction_gap_below_tol", to_string(frac_small));
        d.wacky.note("fraction_gap_above_threshold", to_string(frac_large));
        d.wacky.note("gap_threshold", to_string(protocol.gap_threshold));
        if (frac_small >= need) {
            d.wholesome.status = Verdict::Witnessed;
            d.wacky.status = Verdict::Refuted;
        } else if (frac_large >= need) {
            d.wacky.status = Verdict::Witnessed;
            d.wholesome.status = Verdict::Refuted;
        }
    }

    // Weird: singular at scale eps with every basin below 2 eps.
    if (input.trapping && input.map) {
        const TrappingReport& rep = *input.trapping;
        try {
            SingularityWitness w = singularity_witness(*input.map, rep);
            Rational largest = 0;
            for (const auto& r : rep.regions) largest = rmax(largest, detail::open_union_measure(r.components));
            Rational bound = largest + (1 - w.measure);
            d.weird.note("eps", to_string(rep.eps));
            d.weird.note("singular_set_measure", to_string(w.measure));
            d.weird.note("singular_image_measure", to_string(w.image_measure));
            d.weird.note("max_basin_bound", to_string(bound));
            bool basins_small = bound < 2 * rep.eps;
            if (d.wonderful.status == Verdict::Witnessed) {
                d.weird.status = Verdict::Refuted;
                d.weird.note("route", "wonderful witnessed");
            }
            else if (basins_small && d.wholesome.status == Verdict::Witnessed)
                d.weird.status = Verdict::Witnessed;
        } catch (const VerificationFailure& e) {
            d.weird.note("reason", e.what());
        }
    } else {
        if (d.wonderful.status == Verdict::Witnessed) {
            d.weird.status = Verdict::Refuted;
            d.weird.note("route", "wonderful witnessed");
        } else {
            d.weird.note("reason", "no trapping report");
        }
    }

    // Wicked: Cesaro specs near two distinct declared invariant specs at different horizons.
    const auto specs = protocol.specs();
    std::vector<std::optional<CylinderSpec>> ces;
    if (input.conjugator) {
        for (long n : protocol.horizons) ces.push_back(input.conjugator->cesaro(n, protocol.level));
        d.wicked.note("route", "symbolic cylinder windows");
    } else if (d.wacky.status == Verdict::Refuted) {
        // Wicked maps are wacky.
        d.wicked.status = Verdict::Refuted;
        d.wicked.note("route", "wacky refuted");
    } else {
        d.wicked.note("route", "exact push-forward");
        try {
            auto ms = cesaro_at(*input.map, CircleMeasure::lebesgue(), protocol.horizons, protocol.max_pieces, protocol.max_bits,
                                protocol.max_work);
            for (const auto& m : ms) ces.push_back(cylinder_vector(m, protocol.ell, protocol.level));
        } catch (const ResourceExhausted& e) {
            d.wicked.note("reason", e.what());
        }
    }
    std::vector<std::size_t> matched_at;  // spec index matched per horizon, or npos
    for (std::size_t h = 0; h < ces.size(); ++h) {
        std::size_t hit = std::string::npos;
        Rational best = 2;
        for (std::size_t s = 0; s < specs.size(); ++s) {
            Rational dist = spec_distance(*ces[h], specs[s].spec);
            d.wicked.note("distance[" + std::to_string(protocol.horizons[h]) + "][" + specs[s].name + "]", to_string(dist));
            if (dist <= protocol.tol && dist < best) {
                best = dist;
                hit = s;
            }
        }
        matched_at.push_back(hit);
    }
    std::vector<std::size_t> distinct;
    for (auto s : matched_at)
        if (s != std::string::npos && std::find(distinct.begin(), distinct.end(), s) == distinct.end()) distinct.push_back(s);
    if (distinct.size() >= 2) {
        d.wicked.status = Verdict::Witnessed;
        std::string names;
        for (auto s : distinct) names += (names.empty() ? "" : ",") + specs[s].name;
        d.wicked.note("matched", names);
        if (d.wacky.status != Verdict::Witnessed) d.wicked.note("warning", "wicked evidence without wacky evidence");
    }
    return d;
}

inline WDiagnostics classify(const PLCircleMap& f, const WProtocol& protocol = {})
{
    ClassifyInput in;
    in.map = f;
    return classify(in, protocol);
}

/// "x,gap" rows; gaps that could not be computed are left empty.
inline std::string gaps_csv(const WDiagnostics& d)
{
    std::string out = "x,gap\n";
    for (std::size_t i = 0; i < d.grid.size(); ++i)
        out += to_string(d.grid[i]) + "," + (d.gaps[i] ? to_string(*d.gaps[i]) : std::string()) + "\n";
    return out;
}

}  // namespace circdyn
