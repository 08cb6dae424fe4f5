#pragma once

#include <algorithm>
#include <iterator>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "circdyn/circle.hpp"
#include "circdyn/errors.hpp"
#include "circdyn/rational.hpp"

namespace circdyn {

inline constexpr std::size_t kDefaultMaxBreakpoints = 1'000'000;

/// Continuous piecewise-linear circle map, given by its lift F on [0, 1]:
/// affine between consecutive breakpoints and extended by F(t + 1) = F(t) + degree.
///
/// Stored canonically: F(0) in [0, 1) and no interior breakpoint between two
/// pieces of equal slope, so two maps are equal as functions iff they compare equal.
class PLCircleMap {
public:
    PLCircleMap(std::vector<Rational> breakpoints, std::vector<Rational> lift_values)
        : bp_(std::move(breakpoints)), lift_(std::move(lift_values))
    {
        if (bp_.size() < 2 || bp_.size() != lift_.size())
            throw InvalidInput("PL map needs matching breakpoint/lift lists of length >= 2");
        if (bp_.front() != 0 || bp_.back() != 1)
            throw InvalidInput("PL map breakpoints must start at 0 and end at 1");
        for (std::size_t i = 0; i + 1 < bp_.size(); ++i)
            if (!(bp_[i] < bp_[i + 1])) throw InvalidInput("PL map breakpoints must be strictly increasing");
        Rational deg = lift_.back() - lift_.front();
        if (deg.get_den() != 1) throw InvalidInput("PL map degree F(1) - F(0) must be an integer");
        degree_ = deg.get_num().get_si();
        canonicalize();
    }

    static PLCircleMap identity() { return PLCircleMap({0, 1}, {0, 1}); }

    static PLCircleMap rotation(const Rational& angle)
    {
        Rational a = frac(angle);
        return PLCircleMap({0, 1}, {a, Rational(a + 1)});
    }

    /// x -> degree * x mod 1.
    static PLCircleMap linear(long degree) { return PLCircleMap({0, 1}, {0, Rational(degree)}); }

    const std::vector<Rational>& breakpoints() const { return bp_; }
    const std::vector<Rational>& lift_values() const { return lift_; }
    long degree() const { return degree_; }
    std::size_t piece_count() const { return bp_.size() - 1; }

    const Rational& slope(std::size_t piece) const { return slopes_[piece]; }

    /// Index of the piece [x_i, x_{i+1}) containing t in [0, 1).
    std::size_t piece_of(const Rational& t) const
    {
        auto it = std::upper_bound(bp_.begin(), bp_.end(), t);
        std::size_t i = static_cast<std::size_t>(it - bp_.begin());
        if (i == 0) return 0;
        return std::min(i - 1, piece_count() - 1);
    }

    /// The lift F(t) for any real t.
    Rational lift(const Rational& t) const
    {
        if (t >= 0 && t < 1) {
            std::size_t i = piece_of(t);
            return lift_[i] + (t - bp_[i]) * slopes_[i];
        }
        Integer n = floor_int(t);
        Rational s = t - Rational(n);
        std::size_t i = piece_of(s);
        Rational v = lift_[i] + (s - bp_[i]) * slopes_[i];
        return v + Rational(n * degree_);
    }

    CirclePoint operator()(const CirclePoint& x) const { return CirclePoint::wrap(lift(x.value())); }

    bool is_homeomorphism() const
    {
        if (degree_ != 1 && degree_ != -1) return false;
        for (std::size_t i = 0; i < piece_count(); ++i)
            if (sign(slope(i)) != static_cast<int>(degree_)) return false;
        return true;
    }

    bool is_orientation_preserving() const { return degree_ == 1 && is_homeomorphism(); }

    /// max |slope|.
    Rational lipschitz() const
    {
        Rational best = 0;
        for (std::size_t i = 0; i < piece_count(); ++i) best = rmax(best, rabs(slope(i)));
        return best;
    }

    friend bool operator==(const PLCircleMap& a, const PLCircleMap& b)
    {
        return a.degree_ == b.degree_ && a.bp_ == b.bp_ && a.lift_ == b.lift_;
    }

private:
    void canonicalize()
    {
        Integer shift = floor_int(lift_.front());
        if (shift != 0)
            for (auto& v : lift_) v -= Rational(shift);
        std::vector<Rational> bp{bp_.front()}, lv{lift_.front()};
        for (std::size_t i = 1; i + 1 < bp_.size(); ++i) {
            Rational left = (lift_[i] - lv.back()) / (bp_[i] - bp.back());
            Rational right = (lift_[i + 1] - lift_[i]) / (bp_[i + 1] - bp_[i]);
            if (left != right) {
                bp.push_back(bp_[i]);
                lv.push_back(lift_[i]);
            }
        }
        bp.push_back(bp_.back());
        lv.push_back(lift_.back());
        bp_ = std::move(bp);
        lift_ = std::move(lv);
        slopes_.clear();
        slopes_.reserve(bp_.size() - 1);
        for (std::size_t i = 0; i + 1 < bp_.size(); ++i) slopes_.push_back((lift_[i + 1] - lift_[i]) / (bp_[i + 1] - bp_[i]));
    }

    std::vector<Rational> bp_;
    std::vector<Rational> lift_;
    std::vector<Rational> slopes_;
    long degree_ = 1;
};

inline CirclePoint evaluate(const PLCircleMap& f, const CirclePoint& x) { return f(x); }
inline Rational lift_evaluate(const PLCircleMap& f, const Rational& t) { return f.lift(t); }

/// f o g. Breakpoints of the result are those of g together with the g-preimages
/// of the breakpoints of f.
inline PLCircleMap compose(const PLCircleMap& f, const PLCircleMap& g,
                           std::size_t max_breakpoints = kDefaultMaxBreakpoints)
{
    const auto& fb = f.breakpoints();
    const auto& gb = g.breakpoints();
    const auto& gl = g.lift_values();
    std::vector<Rational> points(gb.begin(), gb.end());
    for (std::size_t i = 0; i + 1 < gb.size(); ++i) {
        const Rational& a = gb[i];
        const Rational& b = gb[i + 1];
        const Rational& ga = gl[i];
        const Rational& gbv = gl[i + 1];
        if (ga == gbv) continue;
        Rational lo = rmin(ga, gbv), hi = rmax(ga, gbv);
        Rational inv_slope = (b - a) / (gbv - ga);
        for (Integer n = floor_int(lo); Rational(n) < hi; ++n) {
            // f breakpoints shifted by n, strictly inside (lo, hi); skip fb.back() == 1 (same as 0 of next n).
            Rational base(n);
            auto first = std::upper_bound(fb.begin(), fb.end() - 1, Rational(lo - base));
            for (auto it = first; it != fb.end() - 1; ++it) {
                Rational v = *it + base;
                if (!(v < hi)) break;
                points.push_back(a + (v - ga) * inv_slope);
            }
            if (points.size() > max_breakpoints)
                throw ResourceExhausted("composition exceeds breakpoint cap of " + std::to_string(max_breakpoints));
        }
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    std::vector<Rational> values;
    values.reserve(points.size());
    for (const auto& t : points) values.push_back(f.lift(g.lift(t)));
    return PLCircleMap(std::move(points), std::move(values));
}

inline PLCircleMap iterate(const PLCircleMap& f, long n, std::size_t max_breakpoints = kDefaultMaxBreakpoints)
{
    if (n < 0) throw InvalidInput("iterate: negative count");
    PLCircleMap result = PLCircleMap::identity();
    for (long i = 0; i < n; ++i) result = compose(f, result, max_breakpoints);
    return result;
}

inline PLCircleMap invert(const PLCircleMap& f)
{
    if (!f.is_homeomorphism()) throw InvalidInput("invert: map is not a homeomorphism");
    const long deg = f.degree();
    const auto& bp = f.breakpoints();
    const auto& lv = f.lift_values();
    std::vector<std::pair<Rational, Rational>> pairs;  // (y, x) with F(x) = y
    for (long k = -3; k <= 3; ++k)
        for (std::size_t i = 0; i < bp.size(); ++i)
            pairs.emplace_back(lv[i] + Rational(k * deg), bp[i] + Rational(k));
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    auto value_at = [&](const Rational& y) -> Rational {
        auto it = std::lower_bound(pairs.begin(), pairs.end(), std::make_pair(y, Rational(-1000)));
        if (it != pairs.end() && it->first == y) return it->second;
        auto hi = it;
        auto lo = it - 1;
        return lo->second + (y - lo->first) * (hi->second - lo->second) / (hi->first - lo->first);
    };
    std::vector<Rational> ys{0}, xs{value_at(Rational(0))};
    for (const auto& [y, x] : pairs)
        if (y > 0 && y < 1) {
            ys.push_back(y);
            xs.push_back(x);
        }
    ys.emplace_back(1);
    xs.push_back(value_at(Rational(1)));
    return PLCircleMap(std::move(ys), std::move(xs));
}

/// sup_x d(f(x), g(x)) with the flat circle metric. Exact: on each piece of the
/// merged partition the lift difference is affine, so the sup is 1/2 if it
/// meets a half-integer and is attained at an endpoint otherwise.
inline Rational c0_distance(const PLCircleMap& f, const PLCircleMap& g)
{
    std::vector<Rational> pts;
    pts.reserve(f.breakpoints().size() + g.breakpoints().size());
    std::merge(f.breakpoints().begin(), f.breakpoints().end(), g.breakpoints().begin(), g.breakpoints().end(),
               std::back_inserter(pts));
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    // The points are sorted in [0, 1], so both lifts are evaluated by a sweep over the pieces.
    struct Sweep {
        const PLCircleMap& m;
        std::size_t i = 0;
        Rational slope = m.slope(0);

        Rational operator()(const Rational& t)
        {
            const auto& bp = m.breakpoints();
            if (i + 1 < m.piece_count() && bp[i + 1] <= t) {
                while (i + 1 < m.piece_count() && bp[i + 1] <= t) ++i;
                slope = m.slope(i);
            }
            if (t == bp[i]) return m.lift_values()[i];
            return m.lift_values()[i] + (t - bp[i]) * slope;
        }
    };
    Sweep fs{f}, gs{g};
    // With k = floor(delta - 1/2), the nearest integer to delta is k + 1; a change of k
    // between consecutive points, or delta at a half-integer, means the distance hits 1/2.
    const Rational half(1, 2);
    Rational best = 0;
    std::optional<Integer> prev;
    for (const auto& t : pts) {
        Rational delta = fs(t) - gs(t);
        if (delta.get_den() == 2) return half;
        Integer k = floor_int(Rational(delta - half));
        if (prev && *prev != k) return half;
        best = rmax(best, rabs(Rational(delta - Rational(k + 1))));
        prev = std::move(k);
    }
    return best;
}

struct FixedPoint {
    CirclePoint point;
    bool transversal = false;
    /// Sign of F(x) - x - k just left / right of the point.
    int sign_left = 0;
    int sign_right = 0;
};

/// Isolated fixed points and closed arcs of fixed points. An arc of length 1
/// is the whole circle.
struct FixedPointSet {
    std::vector<FixedPoint> points;
    std::vector<Arc> arcs;

    bool empty() const { return points.empty() && arcs.empty(); }
    std::size_t size() const { return points.size() + arcs.size(); }

    Rational arc_measure() const
    {
        Rational m = 0;
        for (const auto& a : arcs) m += a.length();
        return m;
    }
};

/// Solves F(x) = x + k exactly on every affine piece.
inline FixedPointSet fixed_points(const PLCircleMap& f)
{
    const auto& bp = f.breakpoints();
    const auto& lv = f.lift_values();
    const std::size_t m = f.piece_count();
    std::vector<std::pair<Rational, Rational>> zeros;  // closed intervals [l, r]
    for (std::size_t i = 0; i < m; ++i) {
        Rational da = lv[i] - bp[i];
        Rational db = lv[i + 1] - bp[i + 1];
        if (da == db) {
            if (da.get_den() == 1) zeros.emplace_back(bp[i], bp[i + 1]);
            continue;
        }
        Rational lo = rmin(da, db), hi = rmax(da, db);
        for (Integer k = ceil_int(lo); Rational(k) <= hi; ++k) {
            Rational x = bp[i] + (Rational(k) - da) * (bp[i + 1] - bp[i]) / (db - da);
            zeros.emplace_back(x, x);
        }
    }
    std::sort(zeros.begin(), zeros.end());
    std::vector<std::pair<Rational, Rational>> merged;
    for (auto& z : zeros) {
        if (!merged.empty() && z.first <= merged.back().second) {
            if (z.second > merged.back().second) merged.back().second = z.second;
        } else {
            merged.push_back(std::move(z));
        }
    }
    FixedPointSet out;
    if (merged.empty()) return out;
    if (merged.size() == 1 && merged[0].first == 0 && merged[0].second == 1) {
        out.arcs.push_back(Arc::full_circle());
        return out;
    }
    // x = 1 is the point 0: drop a lone zero there, join an arc ending at 1 to one starting at 0.
    if (merged.back().second == 1) {
        auto last = merged.back();
        merged.pop_back();
        if (last.first < 1) {
            if (!merged.empty() && merged.front().first == 0) {
                Rational len = (1 - last.first) + merged.front().second;
                merged.erase(merged.begin());
                merged.emplace_back(last.first, Rational(last.first + len));
            } else {
                merged.push_back(std::move(last));
            }
        }
    }
    auto d_slope_sign = [&](std::size_t piece) { return sign(Rational(f.slope(piece) - 1)); };
    for (const auto& [l, r] : merged) {
        if (l == r) {
            FixedPoint fp{CirclePoint(l)};
            std::size_t right = f.piece_of(l);
            // Left piece: the one ending at l, or containing it in its interior.
            auto it = std::lower_bound(bp.begin(), bp.end(), l);
            std::size_t idx = static_cast<std::size_t>(it - bp.begin());
            std::size_t left = (l == 0) ? m - 1 : idx - 1;
            fp.sign_left = -d_slope_sign(left);
            fp.sign_right = d_slope_sign(right);
            fp.transversal = fp.sign_left != 0 && fp.sign_right != 0 && fp.sign_left != fp.sign_right;
            out.points.push_back(fp);
        } else {
            Rational len = r - l;
            out.arcs.emplace_back(CirclePoint::wrap(l), rmin(len, Rational(1)));
        }
    }
    return out;
}

struct PeriodicPoint {
    FixedPoint point;
    long period = 1;
};

struct PeriodicArc {
    Arc arc;
    long period = 1;
};

struct PeriodicPointSet {
    std::vector<PeriodicPoint> points;
    std::vector<PeriodicArc> arcs;
};

inline CirclePoint orbit_point(const PLCircleMap& f, CirclePoint x, long n)
{
    for (long i = 0; i < n; ++i) x = f(x);
    return x;
}

/// Points of period dividing `period`, tagged with their exact minimal period.
inline PeriodicPointSet periodic_points(const PLCircleMap& f, long period,
                                        std::size_t max_breakpoints = kDefaultMaxBreakpoints)
{
    if (period < 1) throw InvalidInput("periodic_points: period must be >= 1");
    PLCircleMap fp = iterate(f, period, max_breakpoints);
    FixedPointSet fix = fixed_points(fp);
    PeriodicPointSet out;
    std::vector<long> divisors;
    for (long d = 1; d <= period; ++d)
        if (period % d == 0) divisors.push_back(d);
    for (const auto& p : fix.points) {
        long minimal = period;
        for (long d : divisors)
            if (orbit_point(f, p.point, d) == p.point) {
                minimal = d;
                break;
            }
        out.points.push_back({p, minimal});
    }
    for (const auto& a : fix.arcs) {
        long minimal = period;
        for (long d : divisors) {
            if (d == period) break;
            FixedPointSet sub = fixed_points(iterate(f, d, max_breakpoints));
            bool covered = false;
            for (const auto& b : sub.arcs) {
                Rational offset = frac(a.start().value() - b.start().value());
                if (b.length() == 1 || offset + a.length() <= b.length()) covered = true;
            }
            if (covered) {
                minimal = d;
                break;
            }
        }
        out.arcs.push_back({a, minimal});
    }
    return out;
}

/// Continuous piecewise-linear observable phi: S^1 -> R (values at 0 and 1 agree).
class Observable {
public:
    Observable(std::vector<Rational> breakpoints, std::vector<Rational> values)
        : bp_(std::move(breakpoints)), val_(std::move(values))
    {
        if (bp_.size() < 2 || bp_.size() != val_.size())
            throw InvalidInput("observable needs matching breakpoint/value lists of length >= 2");
        if (bp_.front() != 0 || bp_.back() != 1) throw InvalidInput("observable breakpoints must span [0,1]");
        for (std::size_t i = 0; i + 1 < bp_.size(); ++i)
            if (!(bp_[i] < bp_[i + 1])) throw InvalidInput("observable breakpoints must be strictly increasing");
        if (val_.front() != val_.back()) throw InvalidInput("observable must be periodic: value(0) != value(1)");
    }

    static Observable constant(const Rational& c) { return Observable({0, 1}, {c, c}); }

    /// Tent of the given height peaking at `peak`, supported on [peak - half_width, peak + half_width] mod 1.
    static Observable tent(const Rational& peak, const Rational& half_width, const Rational& height = 1)
    {
        if (half_width <= 0 || half_width > Rational(1, 2)) throw InvalidInput("tent half-width must be in (0, 1/2]");
        std::vector<Rational> pts{0, 1, frac(peak), frac(peak - half_width), frac(peak + half_width)};
        auto fn = [&](const Rational& t) {
            Rational d = dist_to_integer(t - peak);
            return d >= half_width ? Rational(0) : Rational(height * (1 - d / half_width));
        };
        return from_function(pts, fn);
    }

    static Observable from_function(std::vector<Rational> points, const std::function<Rational(const Rational&)>& fn)
    {
        points.emplace_back(0);
        points.emplace_back(1);
        std::sort(points.begin(), points.end());
        points.erase(std::unique(points.begin(), points.end()), points.end());
        std::vector<Rational> vals;
        for (const auto& p : points) vals.push_back(fn(p));
        return Observable(std::move(points), std::move(vals));
    }

    const std::vector<Rational>& breakpoints() const { return bp_; }
    const std::vector<Rational>& values() const { return val_; }

    Rational value(const Rational& t) const
    {
        Rational s = frac(t);
        auto it = std::upper_bound(bp_.begin(), bp_.end(), s);
        std::size_t i = static_cast<std::size_t>(it - bp_.begin()) - 1;
        if (i + 1 >= bp_.size()) i = bp_.size() - 2;
        return val_[i] + (s - bp_[i]) * (val_[i + 1] - val_[i]) / (bp_[i + 1] - bp_[i]);
    }

    Rational operator()(const CirclePoint& x) const { return value(x.value()); }

    Rational sup_norm() const
    {
        Rational best = 0;
        for (const auto& v : val_) best = rmax(best, rabs(v));
        return best;
    }

    /// Integral over the lift interval [a, b], b - a <= 1 not required.
    Rational integral(const Rational& a, const Rational& b) const
    {
        if (b < a) return -integral(b, a);
        Integer na = floor_int(a);
        Rational s = a - Rational(na), e = b - Rational(na);
        Rational total = 0;
        while (e > 1) {
            total += integral_unit(s, Rational(1));
            s = 0;
            e -= 1;
        }
        total += integral_unit(s, e);
        return total;
    }

    /// (min, max) over the closed lift interval [a, b].
    std::pair<Rational, Rational> range(const Rational& a, const Rational& b) const
    {
        Rational lo = value(a), hi = lo;
        auto take = [&](const Rational& t) {
            Rational v = value(t);
            lo = rmin(lo, v);
            hi = rmax(hi, v);
        };
        take(b);
        if (b - a >= 1) {
            for (const auto& v : val_) {
                lo = rmin(lo, v);
                hi = rmax(hi, v);
            }
            return {lo, hi};
        }
        Integer n = floor_int(a);
        for (int shift = 0; shift <= 1; ++shift)
            for (const auto& p : bp_) {
                Rational t = p + Rational(n + shift);
                if (t > a && t < b) take(t);
            }
        return {lo, hi};
    }

private:
    // Integral over [s, e] with 0 <= s <= e <= 1.
    Rational integral_unit(const Rational& s, const Rational& e) const
    {
        Rational total = 0;
        for (std::size_t i = 0; i + 1 < bp_.size(); ++i) {
            Rational lo = rmax(s, bp_[i]), hi = rmin(e, bp_[i + 1]);
            if (hi <= lo) continue;
            total += (hi - lo) * (value_in_piece(i, lo) + value_in_piece(i, hi)) / 2;
        }
        return total;
    }

    Rational value_in_piece(std::size_t i, const Rational& t) const
    {
        return val_[i] + (t - bp_[i]) * (val_[i + 1] - val_[i]) / (bp_[i + 1] - bp_[i]);
    }

    std::vector<Rational> bp_;
    std::vector<Rational> val_;
};

}  // namespace circdyn
