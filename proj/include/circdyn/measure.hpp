#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "circdyn/circle.hpp"
#include "circdyn/errors.hpp"
#include "circdyn/pl_map.hpp"
#include "circdyn/rational.hpp"

namespace circdyn {

inline constexpr std::size_t kDefaultMaxPieces = 200'000;

struct Atom {
    CirclePoint at;
    Rational mass;

    friend bool operator==(const Atom& a, const Atom& b) { return a.at == b.at && a.mass == b.mass; }
};

/// Constant density on [start, end) with 0 <= start < end <= 1.
struct DensityPiece {
    Rational start;
    Rational end;
    Rational density;

    Arc arc() const { return Arc(CirclePoint(start), Rational(end - start)); }

    friend bool operator==(const DensityPiece& a, const DensityPiece& b)
    {
        return a.start == b.start && a.end == b.end && a.density == b.density;
    }
};

namespace detail {

/// Finite positive measure in canonical form: atoms sorted and distinct,
/// pieces sorted, disjoint, with adjacent equal densities merged.
struct RawMeasure {
    std::vector<Atom> atoms;
    std::vector<DensityPiece> pieces;

    Rational mass() const
    {
        Rational m = 0;
        for (const auto& a : atoms) m += a.mass;
        for (const auto& p : pieces) m += p.density * (p.end - p.start);
        return m;
    }

    std::size_t size() const { return atoms.size() + pieces.size(); }
};

/// Collects unsorted atom and density contributions, then sweeps them into canonical form.
class Accumulator {
public:
    void add_atom(const CirclePoint& at, const Rational& mass)
    {
        if (mass != 0) atoms_.push_back({at, mass});
    }

    /// Density d on the lift interval [a, b); any length, wraps around the circle.
    void add_density(const Rational& a, const Rational& b, const Rational& d)
    {
        if (d == 0 || !(a < b)) return;
        Rational len = b - a;
        Integer turns = floor_int(len);
        if (turns > 0) add_event(Rational(0), Rational(1), Rational(d * Rational(turns)));
        Rational rest = len - Rational(turns);
        if (rest == 0) return;
        Rational s = frac(a);
        Rational e = s + rest;
        if (e <= 1) {
            add_event(s, e, d);
        } else {
            add_event(s, Rational(1), d);
            add_event(Rational(0), Rational(e - 1), d);
        }
    }

    void add(const RawMeasure& m, const Rational& weight)
    {
        if (weight == 0) return;
        for (const auto& a : m.atoms) add_atom(a.at, Rational(a.mass * weight));
        for (const auto& p : m.pieces) add_event(p.start, p.end, Rational(p.density * weight));
    }

    std::size_t size() const { return atoms_.size() + events_.size() / 2; }

    RawMeasure build()
    {
        RawMeasure out;
        std::sort(atoms_.begin(), atoms_.end(), [](const Atom& x, const Atom& y) { return x.at < y.at; });
        for (auto& a : atoms_) {
            if (!out.atoms.empty() && out.atoms.back().at == a.at) out.atoms.back().mass += a.mass;
            else out.atoms.push_back(std::move(a));
        }
        std::erase_if(out.atoms, [](const Atom& a) { return a.mass == 0; });
        std::sort(events_.begin(), events_.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        Rational current = 0;
        std::size_t i = 0;
        while (i < events_.size()) {
            Rational pos = events_[i].first;
            while (i < events_.size() && events_[i].first == pos) current += events_[i++].second;
            if (i == events_.size()) break;
            const Rational& next = events_[i].first;
            if (current != 0) {
                if (!out.pieces.empty() && out.pieces.back().end == pos && out.pieces.back().density == current)
                    out.pieces.back().end = next;
                else
                    out.pieces.push_back({pos, next, current});
            }
        }
        atoms_.clear();
        events_.clear();
        return out;
    }

private:
    void add_event(const Rational& s, const Rational& e, const Rational& d)
    {
        events_.emplace_back(s, d);
        events_.emplace_back(e, -d);
    }

    std::vector<Atom> atoms_;
    std::vector<std::pair<Rational, Rational>> events_;
};

}  // namespace detail

/// Probability measure on S^1: finitely many atoms plus a piecewise-constant density.
class CircleMeasure {
public:
    static CircleMeasure lebesgue() { return CircleMeasure(detail::RawMeasure{{}, {{0, 1, 1}}}); }

    static CircleMeasure dirac(const CirclePoint& x) { return CircleMeasure(detail::RawMeasure{{{x, 1}}, {}}); }

    /// Validated construction; density arcs must be pairwise disjoint and atoms distinct.
    static CircleMeasure from_parts(const std::vector<Atom>& atoms,
                                    const std::vector<std::pair<Arc, Rational>>& pieces)
    {
        detail::Accumulator acc;
        std::vector<std::pair<Rational, Rational>> covered;
        for (const auto& a : atoms) {
            if (a.mass <= 0) throw InvalidInput("atom masses must be positive");
            acc.add_atom(a.at, a.mass);
        }
        for (std::size_t i = 0; i < atoms.size(); ++i)
            for (std::size_t j = i + 1; j < atoms.size(); ++j)
                if (atoms[i].at == atoms[j].at) throw InvalidInput("atoms must sit at distinct points");
        Rational total_len = 0;
        for (const auto& [arc, d] : pieces) {
            if (d < 0) throw InvalidInput("densities must be nonnegative");
            acc.add_density(arc.start().value(), arc.end_lift(), d);
            covered.emplace_back(arc.start().value(), arc.end_lift());
            total_len += arc.length();
        }
        if (union_measure(covered) != total_len) throw InvalidInput("density arcs overlap");
        CircleMeasure m(acc.build());
        if (m.raw_.mass() != 1) throw InvalidInput("measure total mass is " + to_string(m.raw_.mass()) + ", not 1");
        return m;
    }

    /// Convex combination; weights must be nonnegative and sum to 1.
    static CircleMeasure combine(const std::vector<std::pair<Rational, CircleMeasure>>& terms)
    {
        Rational total = 0;
        detail::Accumulator acc;
        for (const auto& [w, m] : terms) {
            if (w < 0) throw InvalidInput("combine: negative weight");
            total += w;
            acc.add(m.raw_, w);
        }
        if (total != 1) throw InvalidInput("combine: weights must sum to 1");
        return CircleMeasure(acc.build());
    }

    const std::vector<Atom>& atoms() const { return raw_.atoms; }
    const std::vector<DensityPiece>& pieces() const { return raw_.pieces; }
    std::size_t complexity() const { return raw_.size(); }
    Rational total_mass() const { return raw_.mass(); }

    /// mu([0, x)) for x in [0, 1]; atoms at x are excluded.
    Rational cdf(const Rational& x) const
    {
        Rational c = 0;
        for (const auto& a : raw_.atoms) {
            if (a.at.value() < x) c += a.mass;
            else break;
        }
        for (const auto& p : raw_.pieces) {
            if (p.start >= x) break;
            c += p.density * (rmin(p.end, x) - p.start);
        }
        return c;
    }

    /// mu([0, x)) at each of the sorted points xs, in one pass.
    std::vector<Rational> cdf_many(const std::vector<Rational>& xs) const
    {
        std::vector<Rational> out;
        out.reserve(xs.size());
        std::size_t ai = 0, pi = 0;
        Rational base = 0;  // mass of atoms before x and of pieces entirely before x
        for (const auto& x : xs) {
            while (ai < raw_.atoms.size() && raw_.atoms[ai].at.value() < x) base += raw_.atoms[ai++].mass;
            while (pi < raw_.pieces.size() && raw_.pieces[pi].end <= x) {
                base += raw_.pieces[pi].density * (raw_.pieces[pi].end - raw_.pieces[pi].start);
                ++pi;
            }
            Rational c = base;
            if (pi < raw_.pieces.size() && raw_.pieces[pi].start < x)
                c += raw_.pieces[pi].density * (x - raw_.pieces[pi].start);
            out.push_back(std::move(c));
        }
        return out;
    }

    Rational measure_of(const Arc& arc) const
    {
        Rational m = 0;
        for (const auto& [a, b] : arc.unwrap()) {
            Rational atoms_in = 0;
            for (const auto& at : raw_.atoms)
                if (at.at.value() >= a && at.at.value() < b) atoms_in += at.mass;
            m += atoms_in;
            for (const auto& p : raw_.pieces) {
                Rational lo = rmax(a, p.start), hi = rmin(b, p.end);
                if (lo < hi) m += p.density * (hi - lo);
            }
        }
        return m;
    }

    /// Measure of a union of arcs (overlaps counted once).
    Rational measure_of(const std::vector<Arc>& arcs) const
    {
        std::vector<std::pair<Rational, Rational>> lifts;
        for (const auto& a : arcs) lifts.emplace_back(a.start().value(), a.end_lift());
        Rational m = 0;
        for (const auto& [a, b] : normalize_intervals(lifts))
            m += measure_of(Arc(CirclePoint(a), Rational(b - a)));
        return m;
    }

    const detail::RawMeasure& raw() const { return raw_; }

    /// Largest denominator size, in bits, over positions, masses and densities.
    std::size_t max_bits() const
    {
        std::size_t b = 0;
        auto see = [&b](const Rational& q) { b = std::max(b, mpz_sizeinbase(q.get_den_mpz_t(), 2)); };
        for (const auto& a : raw_.atoms) {
            see(a.at.value());
            see(a.mass);
        }
        for (const auto& p : raw_.pieces) {
            see(p.start);
            see(p.end);
            see(p.density);
        }
        return b;
    }

    friend bool operator==(const CircleMeasure& a, const CircleMeasure& b)
    {
        return a.raw_.atoms == b.raw_.atoms && a.raw_.pieces == b.raw_.pieces;
    }

    /// Unchecked construction from canonical data (mass is the caller's responsibility).
    explicit CircleMeasure(detail::RawMeasure raw) : raw_(std::move(raw)) {}

private:
    detail::RawMeasure raw_;
};

/// f_* mu. Flat pieces of f turn absolutely continuous mass into atoms; branches
/// of slope s carry density d / |s| onto their image arcs, summed over overlaps.
inline CircleMeasure pushforward(const PLCircleMap& f, const CircleMeasure& mu,
                                 std::size_t max_pieces = kDefaultMaxPieces)
{
    detail::Accumulator acc;
    for (const auto& a : mu.atoms()) acc.add_atom(f(a.at), a.mass);
    const auto& bp = f.breakpoints();
    const auto& lv = f.lift_values();
    for (const auto& p : mu.pieces()) {
        std::size_t i = f.piece_of(p.start);
        for (; i < f.piece_count() && bp[i] < p.end; ++i) {
            Rational lo = rmax(p.start, bp[i]), hi = rmin(p.end, bp[i + 1]);
            if (!(lo < hi)) continue;
            Rational s = f.slope(i);
            Rational flo = lv[i] + (lo - bp[i]) * s;
            Rational fhi = lv[i] + (hi - bp[i]) * s;
            if (s == 0) {
                acc.add_atom(CirclePoint::wrap(flo), Rational(p.density * (hi - lo)));
            } else if (s > 0) {
                acc.add_density(flo, fhi, Rational(p.density / s));
            } else {
                acc.add_density(fhi, flo, Rational(-p.density / s));
            }
        }
        if (acc.size() > 4 * max_pieces) throw ResourceExhausted("pushforward exceeds piece cap");
    }
    CircleMeasure out(acc.build());
    if (out.complexity() > max_pieces)
        throw ResourceExhausted("pushforward result has " + std::to_string(out.complexity()) +
                                " parts, cap is " + std::to_string(max_pieces));
    return out;
}

/// Cesaro averages (1/n) sum_{k<n} f_*^k mu0 at each requested horizon (ascending).
/// Iterates are kept while they are small; once f_*^k mu0 repeats exactly, the
/// remaining sums are assembled from the cycle.
inline std::vector<CircleMeasure> cesaro_at(const PLCircleMap& f, const CircleMeasure& mu0,
                                            std::vector<long> horizons,
                                            std::size_t max_pieces = kDefaultMaxPieces, std::size_t max_bits = 0,
                                            std::size_t max_work = 0)
{
    std::sort(horizons.begin(), horizons.end());
    if (horizons.empty() || horizons.front() < 1) throw InvalidInput("cesaro: horizons must be >= 1");
    constexpr std::size_t kHistoryBudget = 100000;
    std::vector<CircleMeasure> out;
    std::vector<CircleMeasure> history;
    std::multimap<std::size_t, long> by_size;  // complexity -> index into history
    std::size_t stored = 0;
    bool recording = true;
    detail::RawMeasure sum;
    CircleMeasure current = mu0;
    std::size_t next = 0;
    auto emit = [&](const detail::RawMeasure& total, long n) {
        detail::Accumulator norm;
        norm.add(total, Rational(1, n));
        out.emplace_back(norm.build());
    };
    std::size_t work = 0;
    for (long k = 0; k < horizons.back(); ++k) {
        work += sum.size() + current.complexity();
        if (max_work > 0 && work > max_work)
            throw ResourceExhausted("cesaro: work budget of " + std::to_string(max_work) + " parts spent after " +
                                    std::to_string(k) + " steps");
        if (recording) {
            auto range = by_size.equal_range(current.complexity());
            for (auto it = range.first; it != range.second; ++it) {
                if (!(history[static_cast<std::size_t>(it->second)] == current)) continue;
                // f_*^k mu0 = f_*^j mu0: the sequence is periodic from j on.
                const long j = it->second, period = k - j;
                detail::Accumulator cyc;
                for (long i = j; i < k; ++i) cyc.add(history[static_cast<std::size_t>(i)].raw(), Rational(1));
                detail::RawMeasure cycle = cyc.build();
                for (; next < horizons.size(); ++next) {
                    long n = horizons[next];
                    long q = (n - k) / period, r = (n - k) % period;
                    detail::Accumulator total;
                    total.add(sum, Rational(1));
                    total.add(cycle, Rational(q));
                    for (long i = j; i < j + r; ++i) total.add(history[static_cast<std::size_t>(i)].raw(), Rational(1));
                    emit(total.build(), n);
                }
                return out;
            }
            stored += current.complexity();
            if (stored > kHistoryBudget) {
                recording = false;
                history.clear();
                by_size.clear();
            } else {
                by_size.emplace(current.complexity(), k);
                history.push_back(current);
            }
        }
        detail::Accumulator acc;
        acc.add(sum, Rational(1));
        acc.add(current.raw(), Rational(1));
        sum = acc.build();
        if (sum.size() > max_pieces) throw ResourceExhausted("cesaro sum exceeds piece cap");
        while (next < horizons.size() && horizons[next] == k + 1) {
            emit(sum, k + 1);
            ++next;
        }
        if (k + 1 < horizons.back()) {
            current = pushforward(f, current, max_pieces);
            if (max_bits > 0 && current.max_bits() > max_bits)
                throw ResourceExhausted("cesaro: iterate " + std::to_string(k + 1) + " needs more than " +
                                        std::to_string(max_bits) + "-bit rationals");
        }
    }
    return out;
}

inline CircleMeasure cesaro(const PLCircleMap& f, const CircleMeasure& mu0, long n,
                            std::size_t max_pieces = kDefaultMaxPieces)
{
    if (n < 1) throw InvalidInput("cesaro: n must be >= 1");
    return cesaro_at(f, mu0, {n}, max_pieces).front();
}

inline Rational integrate(const Observable& phi, const CircleMeasure& mu)
{
    Rational total = 0;
    for (const auto& a : mu.atoms()) total += phi(a.at) * a.mass;
    for (const auto& p : mu.pieces()) total += p.density * phi.integral(p.start, p.end);
    return total;
}

/// Probability mu(. n S) / mu(S) for a finite union of arcs S.
inline CircleMeasure restrict_normalize(const CircleMeasure& mu, const std::vector<Arc>& set)
{
    std::vector<std::pair<Rational, Rational>> lifts;
    for (const auto& a : set) lifts.emplace_back(a.start().value(), a.end_lift());
    auto parts = normalize_intervals(lifts);
    Rational total = mu.measure_of(set);
    if (total == 0) throw InvalidInput("restrict_normalize: conditioning set has measure zero");
    detail::Accumulator acc;
    for (const auto& at : mu.atoms())
        for (const auto& [a, b] : parts)
            if (at.at.value() >= a && at.at.value() < b) acc.add_atom(at.at, Rational(at.mass / total));
    for (const auto& p : mu.pieces())
        for (const auto& [a, b] : parts) {
            Rational lo = rmax(a, p.start), hi = rmin(b, p.end);
            if (lo < hi) acc.add_density(lo, hi, Rational(p.density / total));
        }
    return CircleMeasure(acc.build());
}

/// Uniform probability on the orbit of a point of exact minimal period k.
inline CircleMeasure dirac_periodic(const PLCircleMap& f, const CirclePoint& p, long k)
{
    if (k < 1) throw InvalidInput("dirac_periodic: period must be >= 1");
    std::vector<CirclePoint> orbit{p};
    CirclePoint x = p;
    for (long j = 1; j <= k; ++j) {
        x = f(x);
        if (x == p && j < k) throw InvalidInput("dirac_periodic: point has period smaller than k");
        if (j < k) orbit.push_back(x);
    }
    if (!(x == p)) throw InvalidInput("dirac_periodic: point is not k-periodic");
    detail::Accumulator acc;
    for (const auto& q : orbit) acc.add_atom(q, Rational(1, k));
    return CircleMeasure(acc.build());
}

/// L1 distance between the CDFs t -> mu([0, t]) on [0, 1).
inline Rational w1_distance(const CircleMeasure& mu, const CircleMeasure& nu)
{
    std::vector<Rational> events{0, 1};
    for (const auto* m : {&mu, &nu}) {
        for (const auto& a : m->atoms()) events.push_back(a.at.value());
        for (const auto& p : m->pieces()) {
            events.push_back(p.start);
            events.push_back(p.end);
        }
    }
    std::sort(events.begin(), events.end());
    events.erase(std::unique(events.begin(), events.end()), events.end());
    auto density_at = [](const CircleMeasure& m, const Rational& a, const Rational& b) {
        for (const auto& p : m.pieces())
            if (p.start <= a && b <= p.end) return p.density;
        return Rational(0);
    };
    auto atom_at = [](const CircleMeasure& m, const Rational& x) {
        for (const auto& at : m.atoms())
            if (at.at.value() == x) return at.mass;
        return Rational(0);
    };
    std::vector<Rational> cm = mu.cdf_many(events), cn = nu.cdf_many(events);
    Rational total = 0;
    for (std::size_t i = 0; i + 1 < events.size(); ++i) {
        const Rational& a = events[i];
        Rational len = events[i + 1] - a;
        Rational start = (cm[i] + atom_at(mu, a)) - (cn[i] + atom_at(nu, a));
        Rational slope = density_at(mu, a, events[i + 1]) - density_at(nu, a, events[i + 1]);
        Rational end = start + slope * len;
        if (sign(start) * sign(end) >= 0) {
            total += len * rabs(Rational(start + end)) / 2;
        } else {
            Rational root = -start / slope;
            total += root * rabs(start) / 2 + (len - root) * rabs(end) / 2;
        }
    }
    return total;
}

/// |integral(phi_j, mu) - target_j| < eps_j for every j.
inline bool neighborhood_member(const CircleMeasure& mu, const std::vector<Observable>& observables,
                                const std::vector<Rational>& targets, const std::vector<Rational>& epsilons)
{
    if (observables.size() != targets.size() || targets.size() != epsilons.size())
        throw InvalidInput("neighborhood_member: list lengths differ");
    for (std::size_t j = 0; j < observables.size(); ++j)
        if (!(rabs(Rational(integrate(observables[j], mu) - targets[j])) < epsilons[j])) return false;
    return true;
}

/// Cylinder values mu(I_alpha^p) for all words of length p, indexed by word value.
class CylinderSpec {
public:
    CylinderSpec(int ell, int p, std::vector<Rational> values) : ell_(ell), p_(p), values_(std::move(values))
    {
        if (ell_ < 2) throw InvalidInput("cylinder spec: ell must be >= 2");
        if (p_ < 1) throw InvalidInput("cylinder spec: level must be >= 1");
        Integer count = pow_int(ell_, static_cast<unsigned long>(p_));
        if (Integer(static_cast<unsigned long>(values_.size())) != count)
            throw InvalidInput("cylinder spec: expected ell^p values");
        Rational total = 0;
        for (const auto& v : values_) {
            if (v < 0) throw InvalidInput("cylinder spec: negative value");
            total += v;
        }
        if (total != 1) throw InvalidInput("cylinder spec: values sum to " + to_string(total) + ", not 1");
    }

    static CylinderSpec lebesgue(int ell, int p)
    {
        std::size_t n = pow_int(ell, static_cast<unsigned long>(p)).get_ui();
        return CylinderSpec(ell, p, std::vector<Rational>(n, rational(Integer(1), Integer(static_cast<unsigned long>(n)))));
    }

    /// Dirac mass at the fixed point 0 of E_ell.
    static CylinderSpec dirac_at_zero(int ell, int p)
    {
        std::size_t n = pow_int(ell, static_cast<unsigned long>(p)).get_ui();
        std::vector<Rational> v(n, Rational(0));
        v[0] = 1;
        return CylinderSpec(ell, p, std::move(v));
    }

    /// Bernoulli product measure: value(alpha) = prod of probs[digit].
    static CylinderSpec bernoulli(const std::vector<Rational>& probs, int p)
    {
        int ell = static_cast<int>(probs.size());
        std::size_t n = pow_int(ell, static_cast<unsigned long>(p)).get_ui();
        std::vector<Rational> v(n);
        for (std::size_t idx = 0; idx < n; ++idx) {
            Rational prod = 1;
            Word w = Word::from_index(ell, p, Integer(static_cast<unsigned long>(idx)));
            for (int d : w.digits())
                prod *= probs[static_cast<std::size_t>(d)];
            v[idx] = prod;
        }
        return CylinderSpec(ell, p, std::move(v));
    }

    int ell() const { return ell_; }
    int level() const { return p_; }
    const std::vector<Rational>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }

    const Rational& operator[](std::size_t index) const { return values_[index]; }

    const Rational& value(const Word& w) const
    {
        if (w.alphabet_size() != ell_ || w.length() != p_) throw InvalidInput("cylinder spec: word shape mismatch");
        return values_[w.value().get_ui()];
    }

    /// Marginal on words of length q <= p (sum over the last p - q digits).
    std::vector<Rational> marginal(int q) const
    {
        std::vector<Rational> cur = values_;
        for (int level = p_; level > q; --level) {
            std::vector<Rational> next(cur.size() / static_cast<std::size_t>(ell_), Rational(0));
            for (std::size_t i = 0; i < cur.size(); ++i) next[i / static_cast<std::size_t>(ell_)] += cur[i];
            cur = std::move(next);
        }
        return cur;
    }

    /// First word alpha of length p-1 where sum_c mu(alpha c) != sum_b mu(b alpha), if any.
    std::optional<Word> invariance_violation() const
    {
        std::size_t inner = values_.size() / static_cast<std::size_t>(ell_);
        for (std::size_t a = 0; a < inner; ++a) {
            Rational right = 0, left = 0;
            for (std::size_t c = 0; c < static_cast<std::size_t>(ell_); ++c) {
                right += values_[a * static_cast<std::size_t>(ell_) + c];
                left += values_[c * inner + a];
            }
            if (right != left) return Word::from_index(ell_, p_ - 1, Integer(static_cast<unsigned long>(a)));
        }
        return std::nullopt;
    }

    bool is_invariant() const { return !invariance_violation().has_value(); }

    friend bool operator==(const CylinderSpec& a, const CylinderSpec& b)
    {
        return a.ell_ == b.ell_ && a.p_ == b.p_ && a.values_ == b.values_;
    }

private:
    int ell_;
    int p_;
    std::vector<Rational> values_;
};

inline CylinderSpec cylinder_vector(const CircleMeasure& mu, int ell, int p)
{
    std::size_t n = pow_int(ell, static_cast<unsigned long>(p)).get_ui();
    std::vector<Rational> xs;
    xs.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        xs.push_back(rational(Integer(static_cast<unsigned long>(i)), Integer(static_cast<unsigned long>(n))));
    auto c = mu.cdf_many(xs);
    std::vector<Rational> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = c[i + 1] - c[i];
    // Atoms sitting exactly at 1 do not exist (points live in [0,1)), so c[n] is the full mass.
    return CylinderSpec(ell, p, std::move(v));
}

/// max_alpha |a(alpha) - b(alpha)|.
inline Rational spec_distance(const CylinderSpec& a, const CylinderSpec& b)
{
    if (a.ell() != b.ell() || a.level() != b.level()) throw InvalidInput("spec_distance: mismatched dimensions");
    Rational best = 0;
    for (std::size_t i = 0; i < a.size(); ++i) best = rmax(best, rabs(Rational(a[i] - b[i])));
    return best;
}

/// "x,cdf,cdf_approx" rows at n equally spaced points of [0, 1).
inline std::string cdf_csv(const CircleMeasure& mu, std::size_t n)
{
    std::vector<Rational> xs;
    for (std::size_t i = 0; i < n; ++i)
        xs.push_back(rational(Integer(static_cast<unsigned long>(i)), Integer(static_cast<unsigned long>(n))));
    auto c = mu.cdf_many(xs);
    std::ostringstream out;
    out << "x,cdf,cdf_approx\n";
    for (std::size_t i = 0; i < n; ++i) out << to_string(xs[i]) << ',' << to_string(c[i]) << ',' << to_double(c[i]) << '\n';
    return out.str();
}

}  // namespace circdyn
