#include <gtest/gtest.h>

#include <random>

#include "circdyn/circle.hpp"
#include "circdyn/rational.hpp"

using namespace circdyn;

TEST(Rational, ParsesAndPrintsInLowestTerms)
{
    EXPECT_EQ(to_string(parse_rational("6/8")), "3/4");
    EXPECT_EQ(to_string(parse_rational("-2")), "-2/1");
    EXPECT_EQ(to_string(parse_rational("0")), "0/1");
    EXPECT_THROW(parse_rational("1/0"), InvalidInput);
    EXPECT_THROW(parse_rational("x"), InvalidInput);
    EXPECT_THROW(parse_rational("1/-3"), InvalidInput);
}

TEST(Rational, FloorAndFrac)
{
    EXPECT_EQ(floor_int(rational(-1, 3)), -1);
    EXPECT_EQ(frac(rational(-1, 3)), rational(2, 3));
    EXPECT_EQ(ceil_int(rational(7, 2)), 4);
    EXPECT_EQ(dist_to_integer(rational(5, 4)), rational(1, 4));
    EXPECT_EQ(dist_to_integer(rational(-3, 5)), rational(2, 5));
}

TEST(Rational, ArithmeticIsExact)
{
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long> num(-1000000, 1000000), den(1, 1000000);
    for (int i = 0; i < 1000; ++i) {
        Rational a = rational(num(rng), den(rng)), b = rational(num(rng), den(rng));
        EXPECT_EQ(Rational(a + b - b), a);
        if (b != 0) {
            EXPECT_EQ(Rational(a * b / b), a);
        }
    }
}

TEST(Word, Concatenation)
{
    EXPECT_EQ(word_concat(Word::parse(2, "010"), Word::parse(2, "11")).str(), "01011");
    EXPECT_EQ(word_concat(Word(8, {}), Word::parse(8, "7")).str(), "7");
    EXPECT_EQ(word_concat(Word::parse(3, "21"), Word::parse(3, "02")).str(), "2102");
    EXPECT_THROW(word_concat(Word::parse(2, "0"), Word::parse(3, "0")), InvalidInput);
    EXPECT_THROW(Word::parse(2, "2"), InvalidInput);
}

TEST(Word, Interval)
{
    EXPECT_EQ(word_interval(Word::parse(2, "000")), Arc(CirclePoint(Rational(0)), rational(1, 8)));
    EXPECT_EQ(word_interval(Word::parse(2, "111")), Arc(CirclePoint(rational(7, 8)), rational(1, 8)));
    EXPECT_EQ(word_interval(Word(3, {})), Arc::full_circle());
}

TEST(Word, IndexRoundTrip)
{
    for (int ell = 2; ell <= 4; ++ell)
        for (long idx = 0; idx < ell * ell * ell; ++idx)
            EXPECT_EQ(Word::from_index(ell, 3, Integer(idx)).value(), idx);
    EXPECT_THROW(Word::from_index(2, 2, Integer(4)), InvalidInput);
}

TEST(Arc, MeasureAndMembership)
{
    Arc a(CirclePoint(Rational(0)), rational(1, 8));
    EXPECT_EQ(arc_measure(a), rational(1, 8));
    Arc wrap(CirclePoint(rational(3, 4)), rational(1, 2));
    EXPECT_TRUE(arc_contains(wrap, CirclePoint(rational(1, 8))));
    EXPECT_FALSE(arc_contains(wrap, CirclePoint(rational(1, 4))));
    EXPECT_TRUE(arc_contains(wrap, CirclePoint(rational(3, 4))));
    EXPECT_FALSE(arc_contains(a, CirclePoint(rational(1, 8))));
    EXPECT_THROW(CirclePoint(Rational(1)), InvalidInput);
    EXPECT_THROW(Arc(CirclePoint(), rational(3, 2)), InvalidInput);
}

TEST(Word, IntervalsPartitionTheCircle)
{
    for (int ell = 2; ell <= 4; ++ell) {
        for (int p = 1; p <= 8; ++p) {
            long count = pow_int(ell, static_cast<unsigned long>(p)).get_si();
            if (count > 70000) continue;
            Rational total = 0;
            Rational expected_start = 0;
            for (long idx = 0; idx < count; ++idx) {
                Arc a = word_interval(Word::from_index(ell, p, Integer(idx)));
                EXPECT_EQ(a.start().value(), expected_start);
                expected_start = a.end_lift();
                total += a.measure();
            }
            EXPECT_EQ(total, 1);
            EXPECT_EQ(expected_start, 1);
        }
    }
}

TEST(Word, IntervalRefinement)
{
    for (int ell = 2; ell <= 4; ++ell) {
        for (long idx = 0; idx < ell * ell; ++idx) {
            Word w = Word::from_index(ell, 2, Integer(idx));
            Arc parent = word_interval(w);
            Rational cursor = parent.start().value();
            for (int c = 0; c < ell; ++c) {
                Arc child = word_interval(word_concat(w, Word(ell, {c})));
                EXPECT_EQ(child.start().value(), cursor);
                cursor = child.end_lift();
            }
            EXPECT_EQ(cursor, parent.end_lift());
        }
    }
}

TEST(Intervals, NormalizeMergesAndWraps)
{
    auto v = normalize_intervals({{rational(3, 4), rational(5, 4)}, {rational(1, 8), rational(1, 2)}});
    ASSERT_EQ(v.size(), 2u);
    EXPECT_EQ(v[0], std::make_pair(Rational(0), rational(1, 2)));
    EXPECT_EQ(v[1], std::make_pair(rational(3, 4), Rational(1)));
    EXPECT_EQ(union_measure({{Rational(0), Rational(3)}}), 1);
}
