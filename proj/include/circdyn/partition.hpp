#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "circdyn/circle.hpp"
#include "circdyn/errors.hpp"
#include "circdyn/measure.hpp"
#include "circdyn/pl_map.hpp"
#include "circdyn/rational.hpp"

namespace circdyn {

/// Hierarchy of ell-adic partitions J^1, ..., J^n of the circle. Level k holds
/// ell^k arcs indexed by word value, laid counterclockwise in word order.
///
/// Zero-length cells are rejected unless allow_degenerate is set; degenerate
/// families arise when a target measure has null cylinders (Dirac targets).
struct ConsistentFamily {
    int ell = 2;
    int depth = 0;
    std::vector<std::vector<Arc>> levels;  // levels[k - 1] is J^k
    bool allow_degenerate = false;

    const std::vector<Arc>& level(int k) const
    {
        if (k < 1 || k > depth) throw InvalidInput("family level out of range");
        return levels[static_cast<std::size_t>(k - 1)];
    }

    const Arc& cell(const Word& w) const
    {
        if (w.alphabet_size() != ell) throw InvalidInput("family cell: alphabet mismatch");
        return level(w.length())[w.value().get_ui()];
    }

    /// Lift of the left endpoint of J_0^k (the same for every k in a consistent family).
    const Rational& basepoint() const { return levels.front().front().start().value(); }

    friend bool operator==(const ConsistentFamily& a, const ConsistentFamily& b)
    {
        return a.ell == b.ell && a.depth == b.depth && a.levels == b.levels;
    }
};

/// Builds every level by aggregating the deepest one: cell j of level n starts at
/// basepoint + sum of the lengths before it.
inline ConsistentFamily family_from_lengths(int ell, int depth, const Rational& basepoint,
                                            const std::vector<Rational>& deepest, bool allow_degenerate = false)
{
    if (ell < 2) throw InvalidInput("family: ell must be >= 2");
    if (depth < 1) throw InvalidInput("family: depth must be >= 1");
    std::size_t n = pow_int(ell, static_cast<unsigned long>(depth)).get_ui();
    if (deepest.size() != n) throw InvalidInput("family: expected ell^depth cell lengths");
    if (basepoint < 0 || basepoint >= 1) throw InvalidInput("family: basepoint must lie in [0,1)");
    ConsistentFamily fam;
    fam.ell = ell;
    fam.depth = depth;
    fam.allow_degenerate = allow_degenerate;
    fam.levels.resize(static_cast<std::size_t>(depth));
    std::vector<Rational> lengths = deepest;
    for (int k = depth; k >= 1; --k) {
        std::vector<Arc> cells;
        cells.reserve(lengths.size());
        Rational cursor = basepoint;
        for (const auto& len : lengths) {
            if (len < 0 || (len == 0 && !allow_degenerate)) throw InvalidInput("family: cell of nonpositive length");
            cells.emplace_back(CirclePoint::wrap(cursor), len);
            cursor += len;
        }
        if (cursor - basepoint != 1) throw InvalidInput("family: cell lengths do not sum to 1");
        fam.levels[static_cast<std::size_t>(k - 1)] = std::move(cells);
        if (k > 1) {
            std::vector<Rational> parent(lengths.size() / static_cast<std::size_t>(ell), Rational(0));
            for (std::size_t i = 0; i < lengths.size(); ++i) parent[i / static_cast<std::size_t>(ell)] += lengths[i];
            lengths = std::move(parent);
        }
    }
    return fam;
}

/// J_alpha^k = h^{-1}(I_alpha^k) for k <= n.
inline ConsistentFamily family_from_homeo(const PLCircleMap& h, int ell, int n)
{
    if (!h.is_orientation_preserving()) throw InvalidInput("family_from_homeo: h must be an orientation-preserving homeomorphism");
    PLCircleMap hinv = invert(h);
    Integer count = pow_int(ell, static_cast<unsigned long>(n));
    std::size_t cells = count.get_ui();
    std::vector<Rational> bounds;
    bounds.reserve(cells + 1);
    for (std::size_t j = 0; j <= cells; ++j)
        bounds.push_back(hinv.lift(rational(Integer(static_cast<unsigned long>(j)), count)));
    std::vector<Rational> lengths;
    lengths.reserve(cells);
    for (std::size_t j = 0; j < cells; ++j) lengths.push_back(bounds[j + 1] - bounds[j]);
    return family_from_lengths(ell, n, frac(bounds[0]), lengths);
}

struct ConsistencyReport {
    bool ok = true;
    int level = 0;  // parent level p of the failing union identity (or the failing level)
    std::optional<Word> word;
    std::string reason;

    explicit operator bool() const { return ok; }
};

/// Checks shapes, that each level tiles the circle in word order, and that
/// J_alpha^p is the ordered union of its children J_{alpha c}^{p+1} (which
/// gives the identity for every p + q <= n by induction).
inline ConsistencyReport consistency_check(const ConsistentFamily& fam)
{
    auto fail = [](int level, std::optional<Word> w, std::string why) {
        ConsistencyReport r;
        r.ok = false;
        r.level = level;
        r.word = std::move(w);
        r.reason = std::move(why);
        return r;
    };
    if (fam.ell < 2 || fam.depth < 1 || fam.levels.size() != static_cast<std::size_t>(fam.depth))
        return fail(0, std::nullopt, "malformed family shape");
    const std::size_t ell = static_cast<std::size_t>(fam.ell);
    // Level 1 tiles the circle.
    {
        const auto& cells = fam.levels[0];
        if (cells.size() != ell) return fail(1, std::nullopt, "level 1 has the wrong number of cells");
        Rational cursor = cells[0].start().value();
        for (std::size_t c = 0; c < ell; ++c) {
            if (frac(cells[c].start().value() - cursor) != 0)
                return fail(1, Word::from_index(fam.ell, 1, Integer(static_cast<unsigned long>(c))), "level 1 cells out of order");
            if (cells[c].empty() && !fam.allow_degenerate)
                return fail(1, Word::from_index(fam.ell, 1, Integer(static_cast<unsigned long>(c))), "empty cell");
            cursor += cells[c].length();
        }
        if (cursor - cells[0].start().value() != 1) return fail(1, std::nullopt, "level 1 does not cover the circle once");
    }
    for (int p = 1; p < fam.depth; ++p) {
        const auto& parents = fam.levels[static_cast<std::size_t>(p - 1)];
        const auto& children = fam.levels[static_cast<std::size_t>(p)];
        if (children.size() != parents.size() * ell)
            return fail(p + 1, std::nullopt, "level has the wrong number of cells");
        for (std::size_t a = 0; a < parents.size(); ++a) {
            Word w = Word::from_index(fam.ell, p, Integer(static_cast<unsigned long>(a)));
            Rational cursor = parents[a].start().value();
            Rational total = 0;
            for (std::size_t c = 0; c < ell; ++c) {
                const Arc& child = children[a * ell + c];
                if (child.empty() && !fam.allow_degenerate) return fail(p, w, "empty child cell");
                if (frac(child.start().value() - cursor) != 0) return fail(p, w, "children out of order");
                cursor += child.length();
                total += child.length();
            }
            if (total != parents[a].length()) return fail(p, w, "children do not exactly cover the parent");
        }
    }
    return {};
}

/// The monotone degree-one map g with g(I_alpha^n) = J_alpha^n, affine on each
/// deepest cell: g(j / ell^n) = left endpoint of J_j^n. It is flat exactly on
/// degenerate cells, and for nondegenerate families it is h^{-1}.
inline PLCircleMap inverse_from_family(const ConsistentFamily& fam)
{
    auto report = consistency_check(fam);
    if (!report) throw InvalidInput("inconsistent family: " + report.reason);
    const auto& cells = fam.levels.back();
    Integer count = pow_int(fam.ell, static_cast<unsigned long>(fam.depth));
    std::vector<Rational> xs, ys;
    xs.reserve(cells.size() + 1);
    ys.reserve(cells.size() + 1);
    Rational cursor = cells.front().start().value();
    for (std::size_t j = 0; j < cells.size(); ++j) {
        xs.push_back(rational(Integer(static_cast<unsigned long>(j)), count));
        ys.push_back(cursor);
        cursor += cells[j].length();
    }
    xs.emplace_back(1);
    ys.push_back(cursor);
    return PLCircleMap(std::move(xs), std::move(ys));
}

/// The PL homeomorphism affine on each deepest cell with h(J_alpha^n) = I_alpha^n.
inline PLCircleMap homeo_from_family(const ConsistentFamily& fam)
{
    for (const auto& a : fam.levels.back())
        if (a.empty()) throw InvalidInput("homeo_from_family: degenerate family has no homeomorphism");
    return invert(inverse_from_family(fam));
}

/// E_*^q h_*m (I_alpha^p) = sum over beta in A^q of m(J_{beta alpha}^{q+p}).
inline CylinderSpec family_cylinder_pushforward(const ConsistentFamily& fam, int q, int p)
{
    if (q < 0 || p < 1) throw InvalidInput("cylinder_pushforward: need q >= 0 and p >= 1");
    if (q + p > fam.depth)
        throw InvalidInput("cylinder_pushforward: family depth " + std::to_string(fam.depth) + " < q + p = " +
                           std::to_string(q + p));
    const auto& cells = fam.level(q + p);
    std::size_t width = pow_int(fam.ell, static_cast<unsigned long>(p)).get_ui();
    std::vector<Rational> values(width, Rational(0));
    for (std::size_t i = 0; i < cells.size(); ++i) values[i % width] += cells[i].length();
    return CylinderSpec(fam.ell, p, std::move(values));
}

}  // namespace circdyn
