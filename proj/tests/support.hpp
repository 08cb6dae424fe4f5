#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "circdyn/pl_map.hpp"

namespace testing_support {

using circdyn::Rational;

inline Rational random_unit(std::mt19937_64& rng, long den = 997)
{
    std::uniform_int_distribution<long> d(1, den - 1);
    return circdyn::rational(d(rng), den);
}

/// Strictly increasing breakpoints 0 = x0 < ... < x_m = 1.
inline std::vector<Rational> random_breakpoints(std::mt19937_64& rng, std::size_t pieces, long den = 997)
{
    std::vector<Rational> bp{0, 1};
    while (bp.size() < pieces + 1) {
        Rational x = random_unit(rng, den);
        if (std::find(bp.begin(), bp.end(), x) == bp.end()) bp.push_back(x);
    }
    std::sort(bp.begin(), bp.end());
    return bp;
}

/// Orientation-preserving PL homeomorphism with the given number of pieces.
inline circdyn::PLCircleMap random_homeo(std::mt19937_64& rng, std::size_t pieces)
{
    auto bp = random_breakpoints(rng, pieces);
    auto ys = random_breakpoints(rng, pieces);
    Rational shift = random_unit(rng);
    for (auto& y : ys) y += shift;
    return circdyn::PLCircleMap(bp, ys);
}

/// Arbitrary continuous PL map of the given degree.
inline circdyn::PLCircleMap random_map(std::mt19937_64& rng, std::size_t pieces, long degree = 1)
{
    auto bp = random_breakpoints(rng, pieces);
    std::vector<Rational> lift;
    std::uniform_int_distribution<long> d(-1500, 1500);
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) lift.push_back(circdyn::rational(d(rng), 997));
    lift.push_back(lift.front() + Rational(degree));
    return circdyn::PLCircleMap(bp, lift);
}

}  // namespace testing_support

namespace testing_support {

/// Continuous PL map on a coarse grid, so that slopes stay moderate (|slope| <= 2 * grid).
inline circdyn::PLCircleMap random_grid_map(std::mt19937_64& rng, std::size_t breakpoints, long degree, long grid = 12)
{
    std::vector<Rational> bp{0, 1};
    std::uniform_int_distribution<long> cell(1, grid - 1), val(0, grid);
    while (bp.size() < breakpoints + 2) {
        Rational x = circdyn::rational(cell(rng), grid);
        if (std::find(bp.begin(), bp.end(), x) == bp.end()) bp.push_back(x);
    }
    std::sort(bp.begin(), bp.end());
    std::vector<Rational> lift;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) lift.push_back(circdyn::rational(val(rng), grid));
    lift.push_back(lift.front() + Rational(degree));
    return circdyn::PLCircleMap(bp, lift);
}

}  // namespace testing_support

namespace testing_support {

/// Homeomorphism with 2k transversal fixed points, alternately repelling and
/// attracting; slopes are 5/4 next to repellers and 1/2 next to attractors.
inline circdyn::PLCircleMap random_morse_smale(std::mt19937_64& rng, std::size_t k)
{
    auto pts = random_breakpoints(rng, 2 * k);  // 0 = p_0 < ... < p_{2k} = 1
    std::vector<Rational> xs, ys;
    for (std::size_t i = 0; i < 2 * k; ++i) {
        Rational a = pts[i], b = pts[i + 1];
        Rational third = (b - a) / 3;
        xs.push_back(a);
        ys.push_back(a);
        // Even gaps move right (a repels), odd gaps move left.
        Rational m = (i % 2 == 0) ? Rational(a + 2 * third) : Rational(a + third);
        xs.push_back(m);
        ys.push_back((i % 2 == 0) ? Rational(b - third / 2) : Rational(a + third / 2));
    }
    xs.emplace_back(1);
    ys.emplace_back(1);
    circdyn::PLCircleMap g(xs, ys);
    Rational shift = random_unit(rng);
    return circdyn::compose(circdyn::PLCircleMap::rotation(shift),
                            circdyn::compose(g, circdyn::PLCircleMap::rotation(-shift)));
}

/// Double-precision evaluation of a circle map, for orbit-simulation oracles.
inline long double eval_double(const circdyn::PLCircleMap& f, long double x)
{
    const auto& bp = f.breakpoints();
    const auto& lv = f.lift_values();
    x -= std::floor(x);
    std::size_t i = 0;
    while (i + 2 < bp.size() && static_cast<long double>(bp[i + 1].get_d()) <= x) ++i;
    long double x0 = bp[i].get_d(), x1 = bp[i + 1].get_d(), y0 = lv[i].get_d(), y1 = lv[i + 1].get_d();
    long double y = y0 + (x - x0) * (y1 - y0) / (x1 - x0);
    return y - std::floor(y);
}

}  // namespace testing_support
