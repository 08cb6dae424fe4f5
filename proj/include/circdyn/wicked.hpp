#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "circdyn/circle.hpp"
#include "circdyn/errors.hpp"
#include "circdyn/measure.hpp"
#include "circdyn/partition.hpp"
#include "circdyn/pl_map.hpp"
#include "circdyn/rational.hpp"

namespace circdyn {

/// x -> ell * x mod 1, for |ell| >= 2.
inline PLCircleMap expanding_map(long ell)
{
    if (ell > -2 && ell < 2) throw InvalidInput("expanding_map: |ell| must be >= 2");
    return PLCircleMap::linear(ell);
}

struct ExpandingConjugacy {
    long ell;
    PLCircleMap h;
    PLCircleMap f;  // h^{-1} o E_ell o h
};

inline ExpandingConjugacy conjugate(const PLCircleMap& h, long ell,
                                    std::size_t max_breakpoints = kDefaultMaxBreakpoints)
{
    if (!h.is_orientation_preserving()) throw InvalidInput("conjugate: h must be an orientation-preserving homeomorphism");
    PLCircleMap f = compose(invert(h), compose(expanding_map(ell), h, max_breakpoints), max_breakpoints);
    FixedPointSet fp = fixed_points(f);
    long expected = ell > 1 ? ell - 1 : 1 - ell;
    if (!fp.arcs.empty() || static_cast<long>(fp.points.size()) != expected)
        throw VerificationFailure("conjugate: fixed-point count differs from |ell - 1|");
    if (f.degree() != ell) throw VerificationFailure("conjugate: degree mismatch");
    return {ell, h, std::move(f)};
}

/// R_{j/(ell-1)} o h for 0 <= j < ell - 1; each conjugates the same map to E_ell.
inline std::vector<PLCircleMap> rotation_companions(const PLCircleMap& h, long ell)
{
    if (ell < 2) throw InvalidInput("rotation_companions: ell must be >= 2");
    if (!h.is_orientation_preserving()) throw InvalidInput("rotation_companions: h must be an orientation-preserving homeomorphism");
    std::vector<PLCircleMap> out;
    for (long j = 0; j < ell - 1; ++j) out.push_back(compose(PLCircleMap::rotation(rational(j, ell - 1)), h));
    return out;
}

namespace detail {

/// m([0, x) n E^{-k}(I)) for x in [0, 1] and an arc I = [s, s + len) inside [0, 1).
inline Rational preimage_mass_below(const Rational& x, const Integer& scale, const Rational& s, const Rational& len)
{
    Rational y = x * Rational(scale);
    Integer whole = floor_int(y);
    Rational part = y - Rational(whole);
    Rational partial = rmax(Rational(0), Rational(rmin(part, Rational(s + len)) - s));
    return (Rational(whole) * len + partial) / Rational(scale);
}

}  // namespace detail

/// mu(E^{-k}(I)) for a measure with no atoms, in closed form from its densities.
inline Rational preimage_measure(const CircleMeasure& mu, long ell, long k, const Arc& cell)
{
    if (!mu.atoms().empty()) throw InvalidInput("preimage_measure: measure must be atomless");
    Integer scale = pow_int(ell, static_cast<unsigned long>(k));
    Rational total = 0;
    for (const auto& [s, e] : cell.unwrap())
        for (const auto& p : mu.pieces())
            total += p.density * (detail::preimage_mass_below(p.end, scale, s, Rational(e - s)) -
                                  detail::preimage_mass_below(p.start, scale, s, Rational(e - s)));
    return total;
}

/// E_*^q h_*m on the level-p cylinders, in closed form from the density of h_*m.
inline CylinderSpec cylinder_pushforward(const PLCircleMap& h, int ell, long q, int p)
{
    if (!h.is_orientation_preserving()) throw InvalidInput("cylinder_pushforward: h must be an orientation-preserving homeomorphism");
    if (q < 0 || p < 1) throw InvalidInput("cylinder_pushforward: need q >= 0 and p >= 1");
    CircleMeasure hm = pushforward(h, CircleMeasure::lebesgue());
    std::size_t n = pow_int(ell, static_cast<unsigned long>(p)).get_ui();
    std::vector<Rational> values;
    values.reserve(n);
    for (std::size_t a = 0; a < n; ++a)
        values.push_back(preimage_measure(hm, ell, q, word_interval(Word::from_index(ell, p, Integer(static_cast<unsigned long>(a))))));
    return CylinderSpec(ell, p, std::move(values));
}

/// Same values from an explicit family, by summing cell measures.
inline CylinderSpec cylinder_pushforward(const ConsistentFamily& fam, int q, int p)
{
    return family_cylinder_pushforward(fam, q, p);
}

/// (1/n) sum_{k<n} E_*^k h_*m on level-p cylinders.
inline CylinderSpec cesaro_cylinder(const ConsistentFamily& fam, long n, int p)
{
    if (n < 1) throw InvalidInput("cesaro_cylinder: n must be >= 1");
    if (n - 1 + p > fam.depth) throw InvalidInput("cesaro_cylinder: family depth must be >= n - 1 + p");
    std::vector<Rational> sum(pow_int(fam.ell, static_cast<unsigned long>(p)).get_ui(), Rational(0));
    for (long k = 0; k < n; ++k) {
        CylinderSpec s = family_cylinder_pushforward(fam, static_cast<int>(k), p);
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += s[i];
    }
    for (auto& v : sum) v /= n;
    return CylinderSpec(fam.ell, p, std::move(sum));
}

inline CylinderSpec cesaro_cylinder(const PLCircleMap& h, int ell, long n, int p)
{
    if (n < 1) throw InvalidInput("cesaro_cylinder: n must be >= 1");
    std::vector<Rational> sum(pow_int(ell, static_cast<unsigned long>(p)).get_ui(), Rational(0));
    for (long k = 0; k < n; ++k) {
        CylinderSpec s = cylinder_pushforward(h, ell, k, p);
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += s[i];
    }
    for (auto& v : sum) v /= n;
    return CylinderSpec(ell, p, std::move(sum));
}

enum class SpecExtension { Markov, Product };

/// Extension of an invariant level-p spec to words of every length. Markov:
/// order p-1 chain with the spec's transition frequencies (stationary because
/// the spec is invariant). Product: i.i.d. digits with the level-1 marginal,
/// accepted only when it reproduces the spec.
class ExtendedSpec {
public:
    explicit ExtendedSpec(CylinderSpec spec, SpecExtension kind = SpecExtension::Markov)
        : spec_(std::move(spec)), kind_(kind)
    {
        if (auto bad = spec_.invariance_violation())
            throw InvalidInput("target spec is not invariant: marginals disagree at word " + bad->str());
        for (int q = 0; q <= spec_.level(); ++q) marginals_.push_back(spec_.marginal(q));
        if (kind_ == SpecExtension::Product) {
            const auto& m1 = marginals_[1];
            for (std::size_t idx = 0; idx < spec_.size(); ++idx) {
                Word w = Word::from_index(spec_.ell(), spec_.level(), Integer(static_cast<unsigned long>(idx)));
                Rational prod = 1;
                for (int d : w.digits()) prod *= m1[static_cast<std::size_t>(d)];
                if (prod != spec_[idx]) throw InvalidInput("product extension does not reproduce the target spec at word " + w.str());
            }
        }
    }

    const CylinderSpec& spec() const { return spec_; }
    SpecExtension kind() const { return kind_; }
    int ell() const { return spec_.ell(); }

    /// mu(I_w) for the word digits[from, from + len).
    Rational value(const std::vector<int>& digits, std::size_t from, std::size_t len) const
    {
        if (len == 0) return 1;
        const std::size_t p = static_cast<std::size_t>(spec_.level());
        if (kind_ == SpecExtension::Product) {
            Rational prod = 1;
            for (std::size_t i = 0; i < len; ++i) prod *= marginals_[1][static_cast<std::size_t>(digits[from + i])];
            return prod;
        }
        if (len <= p) return marginals_[len][index(digits, from, len)];
        Rational v = marginals_[p][index(digits, from, p)];
        for (std::size_t i = p; i < len && v != 0; ++i) v *= transition(digits, from + i - (p - 1), digits[from + i]);
        return v;
    }

    /// P(next digit = c | the up to p-1 preceding digits digits[from, from + len)).
    Rational conditional(const std::vector<int>& digits, std::size_t from, std::size_t len, int c) const
    {
        if (kind_ == SpecExtension::Product) return marginals_[1][static_cast<std::size_t>(c)];
        const std::size_t p = static_cast<std::size_t>(spec_.level());
        if (len >= p) return transition(digits, from + len - (p - 1), c);
        const Rational& denom = marginals_[len][index(digits, from, len)];
        if (denom == 0) return 0;
        std::size_t idx = index(digits, from, len) * static_cast<std::size_t>(spec_.ell()) + static_cast<std::size_t>(c);
        return marginals_[len + 1][idx] / denom;
    }

private:
    std::size_t index(const std::vector<int>& digits, std::size_t from, std::size_t len) const
    {
        std::size_t v = 0;
        for (std::size_t i = 0; i < len; ++i) v = v * static_cast<std::size_t>(spec_.ell()) + static_cast<std::size_t>(digits[from + i]);
        return v;
    }

    // mu(state c) / mu(state) for the length p-1 state starting at `from`.
    Rational transition(const std::vector<int>& digits, std::size_t from, int c) const
    {
        const std::size_t p = static_cast<std::size_t>(spec_.level());
        std::size_t state = index(digits, from, p - 1);
        const Rational& denom = marginals_[p - 1][state];
        if (denom == 0) return 0;
        return marginals_[p][state * static_cast<std::size_t>(spec_.ell()) + static_cast<std::size_t>(c)] / denom;
    }

    CylinderSpec spec_;
    SpecExtension kind_;
    std::vector<std::vector<Rational>> marginals_;  // marginals_[q] for q = 0..p
};

inline constexpr std::size_t kDefaultMaxCells = std::size_t{1} << 20;

/// The measure nu = h'_*m behind a perturbed conjugator, held symbolically:
/// base-ell digits at positions [0, n0) follow h_*m, positions [n0, depth)
/// follow the extended target independently, and later positions are uniform.
/// The conjugator h' is the unique homeomorphism (or, for degenerate targets,
/// monotone correspondence) with h'(J_alpha) = I_alpha, J_alpha of measure nu(I_alpha).
class StagedConjugator {
public:
    StagedConjugator(PLCircleMap base, int ell, int n0, long depth, ExtendedSpec target)
        : base_(std::move(base)), ell_(ell), n0_(n0), depth_(depth), target_(std::move(target))
    {
        if (!base_.is_orientation_preserving()) throw InvalidInput("staged conjugator: base must be an orientation-preserving homeomorphism");
        if (ell_ < 2) throw InvalidInput("staged conjugator: ell must be >= 2");
        if (target_.ell() != ell_) throw InvalidInput("staged conjugator: target alphabet differs from ell");
        if (n0_ < 0 || depth_ < n0_) throw InvalidInput("staged conjugator: need 0 <= n0 <= depth");
        base_inv_ = invert(base_);
        base_measure_ = pushforward(base_, CircleMeasure::lebesgue());
    }

    int ell() const { return ell_; }
    int n0() const { return n0_; }
    long depth() const { return depth_; }
    const PLCircleMap& base() const { return base_; }
    const ExtendedSpec& target() const { return target_; }

    /// h_*m(I_w) for the word digits[0, len), len <= n0.
    Rational base_cell(const std::vector<int>& digits, std::size_t len) const
    {
        Integer v = 0;
        for (std::size_t i = 0; i < len; ++i) v = v * ell_ + digits[i];
        Integer scale = pow_int(ell_, static_cast<unsigned long>(len));
        Rational a = rational(v, scale), b = rational(Integer(v + 1), scale);
        return base_inv_.lift(b) - base_inv_.lift(a);
    }

    /// nu(I_w) for a word of any length.
    Rational cell_measure(const Word& w) const
    {
        const auto& d = w.digits();
        std::size_t len = d.size();
        std::size_t nb = std::min<std::size_t>(len, static_cast<std::size_t>(n0_));
        Rational v = base_cell(d, nb);
        if (len > nb) {
            std::size_t stage_end = std::min<std::size_t>(len, static_cast<std::size_t>(depth_));
            v *= target_.value(d, nb, stage_end - nb);
            if (len > stage_end) v /= Rational(pow_int(ell_, static_cast<unsigned long>(len - stage_end)));
        }
        return v;
    }

    /// E_*^k nu on level-p cylinders, in closed form.
    CylinderSpec cylinder(long k, int p) const
    {
        if (k < 0 || p < 1) throw InvalidInput("cylinder: need k >= 0 and p >= 1");
        std::size_t n = pow_int(ell_, static_cast<unsigned long>(p)).get_ui();
        std::vector<Rational> values;
        values.reserve(n);
        for (std::size_t a = 0; a < n; ++a) {
            Word w = Word::from_index(ell_, p, Integer(static_cast<unsigned long>(a)));
            values.push_back(window_probability(k, w.digits()));
        }
        return CylinderSpec(ell_, p, std::move(values));
    }

    /// (1/n) sum_{k<n} of cylinder(k, p).
    CylinderSpec cesaro(long n, int p) const
    {
        if (n < 1) throw InvalidInput("cesaro: n must be >= 1");
        std::vector<Rational> sum;
        // Windows inside the uniform tail all give the Lebesgue spec.
        long stop = std::min<long>(n, depth_);
        for (long k = 0; k < stop; ++k) {
            CylinderSpec s = cylinder(k, p);
            if (sum.empty()) sum.assign(s.size(), Rational(0));
            for (std::size_t i = 0; i < s.size(); ++i) sum[i] += s[i];
        }
        if (n > stop) {
            CylinderSpec leb = CylinderSpec::lebesgue(ell_, p);
            if (sum.empty()) sum.assign(leb.size(), Rational(0));
            for (std::size_t i = 0; i < leb.size(); ++i) sum[i] += leb[i] * Rational(n - stop);
        }
        for (auto& v : sum) v /= n;
        return CylinderSpec(ell_, p, std::move(sum));
    }

    /// Lift of g = h'^{-1} at z in [0, 1): g(z) = g(0) + nu([0, z)).
    Rational inverse_lift(const Rational& z) const { return base_inv_.lift(Rational(0)) + cdf(z); }

    CirclePoint inverse(const CirclePoint& z) const { return CirclePoint::wrap(inverse_lift(z.value())); }

    /// nu([0, z)) by walking the base-ell digits of z; stops early once the path has no mass.
    Rational cdf(const Rational& z) const
    {
        if (z < 0 || z > 1) throw InvalidInput("cdf: argument outside [0,1]");
        if (z == 1) return 1;
        std::vector<int> digits;
        Rational acc = 0, path = 1, rest = z;
        for (long t = 0; t < depth_; ++t) {
            rest *= ell_;
            Integer dz = floor_int(rest);
            rest -= Rational(dz);
            int d = static_cast<int>(dz.get_si());
            std::vector<Rational> probs = child_probabilities(digits, static_cast<std::size_t>(t));
            for (int c = 0; c < d; ++c) acc += path * probs[static_cast<std::size_t>(c)];
            path *= probs[static_cast<std::size_t>(d)];
            digits.push_back(d);
            if (path == 0) return acc;
            if (rest == 0) return acc;
        }
        return acc + path * rest;
    }

    /// h'(x): the point y with g(y) = x, by inverting the digit walk.
    CirclePoint forward(const CirclePoint& x) const
    {
        Rational t = frac(Rational(x.value() - base_inv_.lift(Rational(0))));
        std::vector<int> digits;
        Rational lo = 0, width = 1, path = 1;
        for (long s = 0; s < depth_; ++s) {
            std::vector<Rational> probs = child_probabilities(digits, static_cast<std::size_t>(s));
            width /= ell_;
            int chosen = -1;
            for (int c = 0; c < ell_; ++c) {
                Rational mass = path * probs[static_cast<std::size_t>(c)];
                if (mass > 0 && t < mass) {
                    chosen = c;
                    break;
                }
                t -= mass;
            }
            if (chosen < 0) {
                // Only reachable through rounding at the top end; take the last child with mass.
                for (int c = ell_ - 1; c >= 0; --c)
                    if (probs[static_cast<std::size_t>(c)] > 0) {
                        chosen = c;
                        break;
                    }
                t = 0;
            }
            lo += width * chosen;
            path *= probs[static_cast<std::size_t>(chosen)];
            digits.push_back(chosen);
        }
        return CirclePoint::wrap(lo + width * (t / path));
    }

    /// Explicit family J^1..J^depth with m(J_alpha) = nu(I_alpha).
    ConsistentFamily family(std::size_t max_cells = kDefaultMaxCells) const
    {
        Integer count = pow_int(ell_, static_cast<unsigned long>(depth_));
        if (count > Integer(static_cast<unsigned long>(max_cells)))
            throw ResourceExhausted("family materialization needs " + count.get_str() + " cells");
        std::vector<Rational> masses;
        masses.reserve(count.get_ui());
        std::vector<int> digits;
        enumerate(digits, Rational(1), masses);
        bool degenerate = false;
        for (const auto& m : masses)
            if (m == 0) degenerate = true;
        return family_from_lengths(ell_, static_cast<int>(depth_), frac(base_inv_.lift(Rational(0))), masses, degenerate);
    }

    /// Conditional digit probabilities at position t given the preceding digits.
    std::vector<Rational> child_probabilities(const std::vector<int>& digits, std::size_t t) const
    {
        std::vector<Rational> probs(static_cast<std::size_t>(ell_));
        if (t < static_cast<std::size_t>(n0_)) {
            std::vector<int> d = digits;
            Rational parent = base_cell(d, t);
            d.push_back(0);
            for (int c = 0; c < ell_; ++c) {
                d[t] = c;
                probs[static_cast<std::size_t>(c)] = parent == 0 ? Rational(0) : Rational(base_cell(d, t + 1) / parent);
            }
        } else if (t < static_cast<std::size_t>(depth_)) {
            std::size_t from = std::max<std::size_t>(static_cast<std::size_t>(n0_), t >= static_cast<std::size_t>(target_.spec().level()) ? t - static_cast<std::size_t>(target_.spec().level()) + 1 : 0);
            for (int c = 0; c < ell_; ++c) probs[static_cast<std::size_t>(c)] = target_.conditional(digits, from, t - from, c);
        } else {
            for (auto& p : probs) p = Rational(1, ell_);
        }
        return probs;
    }

private:
    /// P(digits at positions k, ..., k + |alpha| - 1 spell alpha).
    Rational window_probability(long k, const std::vector<int>& alpha) const
    {
        const long p = static_cast<long>(alpha.size());
        Rational v = 1;
        // Base block [k, n0).
        long base_end = std::min<long>(k + p, n0_);
        if (k < base_end) {
            std::vector<int> gamma(alpha.begin(), alpha.begin() + (base_end - k));
            Word w(ell_, gamma);
            v *= preimage_measure(base_measure_, ell_, k, word_interval(w));
            if (v == 0) return v;
        }
        // Target block [n0, depth); stationarity makes only the window length matter.
        long s0 = std::max<long>(k, n0_), s1 = std::min<long>(k + p, depth_);
        if (s0 < s1) v *= target_.value(alpha, static_cast<std::size_t>(s0 - k), static_cast<std::size_t>(s1 - s0));
        // Uniform tail.
        long tail = k + p - std::max<long>(k, depth_);
        if (tail > 0) v /= Rational(pow_int(ell_, static_cast<unsigned long>(std::min(tail, p))));
        return v;
    }

    void enumerate(std::vector<int>& digits, const Rational& mass, std::vector<Rational>& out) const
    {
        if (static_cast<long>(digits.size()) == depth_) {
            out.push_back(mass);
            return;
        }
        std::vector<Rational> probs = child_probabilities(digits, digits.size());
        for (int c = 0; c < ell_; ++c) {
            digits.push_back(c);
            enumerate(digits, Rational(mass * probs[static_cast<std::size_t>(c)]), out);
            digits.pop_back();
        }
    }

    PLCircleMap base_;
    PLCircleMap base_inv_ = PLCircleMap::identity();
    int ell_;
    int n0_;
    long depth_;
    ExtendedSpec target_;
    CircleMeasure base_measure_ = CircleMeasure::lebesgue();
};

/// Minimal n0 >= 1 with ell^{-n0} <= eps.
inline int scale_index(long ell, const Rational& eps)
{
    if (eps <= 0) throw InvalidInput("eps must be positive");
    int n0 = 1;
    Integer power = ell;
    while (Rational(1) / Rational(power) > eps) {
        power *= ell;
        ++n0;
    }
    return n0;
}

struct WickedResult {
    StagedConjugator conjugator;
    int n0 = 0;
    long depth = 0;
    std::optional<ConsistentFamily> family;  // materialized when ell^depth is within the cell cap
    std::optional<PLCircleMap> inverse;      // g = h'^{-1}, monotone PL
    std::optional<PLCircleMap> h_prime;      // present when no cell is degenerate
    std::optional<Rational> distance;        // sup over the graph of d(h, h'), when materialized
};

/// Perturbs h within eps so that E_*^k h'_*m matches the target on level-p
/// cylinders for every n0 <= k <= n - 1. The family is built to depth n - 1 + p,
/// deep enough for the last window.
inline WickedResult wicked_perturb(const PLCircleMap& h, int ell, const CylinderSpec& target, const Rational& eps, long n,
                                   SpecExtension extension = SpecExtension::Markov,
                                   std::size_t max_cells = kDefaultMaxCells)
{
    if (ell < 2) throw InvalidInput("wicked_perturb: ell must be >= 2");
    if (target.ell() != ell) throw InvalidInput("wicked_perturb: target alphabet differs from ell");
    int n0 = scale_index(ell, eps);
    const int p = target.level();
    if (n <= n0 + p)
        throw InvalidInput("wicked_perturb: need n > n0 + p = " + std::to_string(n0 + p));
    long depth = n - 1 + p;
    WickedResult res{StagedConjugator(h, ell, n0, depth, ExtendedSpec(target, extension)), n0, depth, {}, {}, {}, {}};
    Integer cells = pow_int(ell, static_cast<unsigned long>(depth));
    if (cells <= Integer(static_cast<unsigned long>(max_cells))) {
        res.family = res.conjugator.family(max_cells);
        res.inverse = inverse_from_family(*res.family);
        bool degenerate = false;
        for (const auto& c : res.family->levels.back())
            if (c.empty()) degenerate = true;
        if (!degenerate) res.h_prime = invert(*res.inverse);
        // d(h, h') = sup_z d(h(g(z)), z) over the completed graph of h'.
        res.distance = c0_distance(compose(h, *res.inverse), PLCircleMap::identity());
    }
    return res;
}

/// E^k(x) exactly.
inline CirclePoint expand(const CirclePoint& x, long ell, long k)
{
    return CirclePoint::wrap(x.value() * Rational(pow_int(ell, static_cast<unsigned long>(k))));
}

}  // namespace circdyn
