#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "ambilab/errors.hpp"

namespace ambilab {

/// Exact rational number over 64-bit integers.
///
/// Always stored normalized: gcd(num, den) == 1 and den > 0. Every operation
/// computes through 128-bit intermediates and throws OverflowError if the
/// normalized result does not fit in int64. Comparisons are exact (128-bit
/// cross products), so rationals are safe as keys and in equality asserts.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t value) : num_(value), den_(1) {} // NOLINT: implicit by design
    Rational(std::int64_t num, std::int64_t den);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_integer() const { return den_ == 1; }
    bool is_zero() const { return num_ == 0; }

    Rational operator-() const;
    Rational abs() const;

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b);
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    /// Nonnegative integer power.
    Rational pow(unsigned exponent) const;

    double to_double() const;

    /// "7/5" for non-integers, "7" for integers.
    std::string str() const;

    /// Parses "3/2", "-7", or a decimal string like "1.224744871" exactly.
    /// Decimal strings are limited to 12 fractional digits.
    static Rational parse(std::string_view text);

    /// Normalizes a 128-bit ratio down to int64, throwing OverflowError when
    /// the reduced form does not fit.
    static Rational from_ratio(__int128 num, __int128 den);

    friend std::ostream& operator<<(std::ostream& os, const Rational& r);

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

namespace detail {
__int128 gcd128(__int128 a, __int128 b);

inline Rational make_rational_128(__int128 num, __int128 den) {
    return Rational::from_ratio(num, den);
}
} // namespace detail

} // namespace ambilab
