#pragma once

#include <algorithm>
#include <compare>
#include <string>
#include <utility>
#include <vector>

#include "circdyn/errors.hpp"
#include "circdyn/rational.hpp"

namespace circdyn {

/// A point of S^1 = R/Z, stored as its representative in [0, 1).
class CirclePoint {
public:
    CirclePoint() = default;

    explicit CirclePoint(Rational v) : value_(std::move(v))
    {
        if (value_ < 0 || value_ >= 1)
            throw InvalidInput("circle point out of [0,1): " + to_string(value_));
    }

    /// Reduces any real representative mod 1.
    static CirclePoint wrap(const Rational& v)
    {
        CirclePoint p;
        p.value_ = frac(v);
        return p;
    }

    const Rational& value() const { return value_; }

    friend bool operator==(const CirclePoint& a, const CirclePoint& b) { return a.value_ == b.value_; }
    friend bool operator<(const CirclePoint& a, const CirclePoint& b) { return a.value_ < b.value_; }

private:
    Rational value_{0};
};

/// d(x, y) = min(|x - y|, 1 - |x - y|).
inline Rational circle_distance(const CirclePoint& x, const CirclePoint& y)
{
    return dist_to_integer(x.value() - y.value());
}

/// Half-open arc [start, start + length) taken mod 1. Zero-length arcs are
/// allowed so that degenerate partition cells can be expressed; they contain
/// no points.
class Arc {
public:
    Arc() = default;

    Arc(CirclePoint start, Rational length) : start_(std::move(start)), length_(std::move(length))
    {
        if (length_ < 0 || length_ > 1)
            throw InvalidInput("arc length out of [0,1]: " + to_string(length_));
    }

    /// Arc from a lift interval [a, b) with 0 <= b - a <= 1.
    static Arc from_lift(const Rational& a, const Rational& b) { return Arc(CirclePoint::wrap(a), Rational(b - a)); }

    static Arc full_circle() { return Arc(CirclePoint(), Rational(1)); }

    const CirclePoint& start() const { return start_; }
    const Rational& length() const { return length_; }
    Rational measure() const { return length_; }
    bool empty() const { return length_ == 0; }

    /// Lift of the right endpoint, start + length (may exceed 1).
    Rational end_lift() const { return start_.value() + length_; }

    bool contains(const CirclePoint& x) const
    {
        if (length_ == 1) return true;
        return frac(x.value() - start_.value()) < length_;
    }

    /// Pieces [a, b) inside [0, 1) whose union is this arc.
    std::vector<std::pair<Rational, Rational>> unwrap() const
    {
        std::vector<std::pair<Rational, Rational>> out;
        if (length_ == 0) return out;
        if (length_ == 1) {
            out.emplace_back(Rational(0), Rational(1));
            return out;
        }
        Rational end = end_lift();
        if (end <= 1) {
            out.emplace_back(start_.value(), end);
        } else {
            out.emplace_back(start_.value(), Rational(1));
            out.emplace_back(Rational(0), Rational(end - 1));
        }
        return out;
    }

    friend bool operator==(const Arc& a, const Arc& b)
    {
        return a.start_ == b.start_ && a.length_ == b.length_;
    }

private:
    CirclePoint start_;
    Rational length_{0};
};

inline Rational arc_measure(const Arc& a) { return a.measure(); }
inline bool arc_contains(const Arc& a, const CirclePoint& x) { return a.contains(x); }

/// Normalizes lift intervals [a, b) to disjoint, sorted, merged pieces of [0, 1).
/// Intervals of length >= 1 cover the circle.
inline std::vector<std::pair<Rational, Rational>> normalize_intervals(
    const std::vector<std::pair<Rational, Rational>>& lifts)
{
    std::vector<std::pair<Rational, Rational>> pieces;
    for (const auto& [a, b] : lifts) {
        if (b <= a) continue;
        if (b - a >= 1) {
            pieces.assign(1, {Rational(0), Rational(1)});
            return pieces;
        }
        Rational s = frac(a);
        Rational e = s + (b - a);
        if (e <= 1) {
            pieces.emplace_back(s, e);
        } else {
            pieces.emplace_back(s, Rational(1));
            pieces.emplace_back(Rational(0), Rational(e - 1));
        }
    }
    std::sort(pieces.begin(), pieces.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<std::pair<Rational, Rational>> merged;
    for (auto& p : pieces) {
        if (!merged.empty() && p.first <= merged.back().second) {
            if (p.second > merged.back().second) merged.back().second = p.second;
        } else {
            merged.push_back(std::move(p));
        }
    }
    return merged;
}

/// Lebesgue measure of a union of lift intervals.
inline Rational union_measure(const std::vector<std::pair<Rational, Rational>>& lifts)
{
    Rational total = 0;
    for (const auto& [a, b] : normalize_intervals(lifts)) total += b - a;
    return total;
}

/// A word over the alphabet {0, ..., ell-1}.
class Word {
public:
    Word() = default;

    Word(int ell, std::vector<int> digits) : ell_(ell), digits_(std::move(digits))
    {
        if (ell_ < 2) throw InvalidInput("word alphabet size must be >= 2");
        for (int d : digits_)
            if (d < 0 || d >= ell_) throw InvalidInput("word digit out of range");
    }

    /// The length-p word whose base-ell value is `index`.
    static Word from_index(int ell, int p, Integer index)
    {
        std::vector<int> digits(static_cast<std::size_t>(p));
        for (int i = p - 1; i >= 0; --i) {
            Integer r;
            mpz_fdiv_qr_ui(index.get_mpz_t(), r.get_mpz_t(), index.get_mpz_t(), static_cast<unsigned long>(ell));
            digits[static_cast<std::size_t>(i)] = static_cast<int>(r.get_si());
        }
        if (index != 0) throw InvalidInput("word index exceeds ell^p");
        return Word(ell, std::move(digits));
    }

    /// Parses a digit string such as "0110" (digits 0-9 then a-z).
    static Word parse(int ell, std::string_view text)
    {
        std::vector<int> digits;
        for (char c : text) {
            int d;
            if (c >= '0' && c <= '9') d = c - '0';
            else if (c >= 'a' && c <= 'z') d = c - 'a' + 10;
            else throw InvalidInput("bad word character");
            digits.push_back(d);
        }
        return Word(ell, std::move(digits));
    }

    int alphabet_size() const { return ell_; }
    int length() const { return static_cast<int>(digits_.size()); }
    const std::vector<int>& digits() const { return digits_; }

    /// The word read as a natural number in base ell.
    Integer value() const
    {
        Integer v = 0;
        for (int d : digits_) v = v * ell_ + d;
        return v;
    }

    std::string str() const
    {
        std::string s;
        for (int d : digits_) s.push_back(d < 10 ? static_cast<char>('0' + d) : static_cast<char>('a' + d - 10));
        return s;
    }

    friend bool operator==(const Word& a, const Word& b) { return a.ell_ == b.ell_ && a.digits_ == b.digits_; }

private:
    int ell_ = 2;
    std::vector<int> digits_;
};

inline Word word_concat(const Word& a, const Word& b)
{
    if (a.alphabet_size() != b.alphabet_size())
        throw InvalidInput("word_concat: alphabet sizes differ");
    std::vector<int> d = a.digits();
    d.insert(d.end(), b.digits().begin(), b.digits().end());
    return Word(a.alphabet_size(), std::move(d));
}

/// I_alpha = [alpha / ell^p, (alpha + 1) / ell^p).
inline Arc word_interval(const Word& w)
{
    Integer scale = pow_int(w.alphabet_size(), static_cast<unsigned long>(w.length()));
    return Arc(CirclePoint(rational(w.value(), scale)), rational(Integer(1), scale));
}

}  // namespace circdyn
