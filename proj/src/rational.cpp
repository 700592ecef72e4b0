#include "ambilab/rational.hpp"

#include <cctype>
#include <limits>
#include <numeric>
#include <ostream>

namespace ambilab {

namespace detail {

__int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

} // namespace detail

namespace {

constexpr __int128 kInt64Max = std::numeric_limits<std::int64_t>::max();
constexpr __int128 kInt64Min = std::numeric_limits<std::int64_t>::min();

} // namespace

Rational Rational::from_ratio(__int128 num, __int128 den) {
    if (den == 0) throw DomainError("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    __int128 g = detail::gcd128(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    if (num > kInt64Max || num < kInt64Min || den > kInt64Max) {
        throw OverflowError("rational overflow; use smaller numerators/denominators");
    }
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
}

Rational::Rational(std::int64_t num, std::int64_t den) {
    *this = from_ratio(num, den);
}

Rational Rational::operator-() const {
    return from_ratio(-static_cast<__int128>(num_), den_);
}

Rational Rational::abs() const {
    return num_ < 0 ? -*this : *this;
}

Rational operator+(const Rational& a, const Rational& b) {
    __int128 num = static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_;
    __int128 den = static_cast<__int128>(a.den_) * b.den_;
    return Rational::from_ratio(num, den);
}

Rational operator-(const Rational& a, const Rational& b) {
    __int128 num = static_cast<__int128>(a.num_) * b.den_ - static_cast<__int128>(b.num_) * a.den_;
    __int128 den = static_cast<__int128>(a.den_) * b.den_;
    return Rational::from_ratio(num, den);
}

Rational operator*(const Rational& a, const Rational& b) {
    return Rational::from_ratio(static_cast<__int128>(a.num_) * b.num_,
                               static_cast<__int128>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw DomainError("rational division by zero");
    return Rational::from_ratio(static_cast<__int128>(a.num_) * b.den_,
                               static_cast<__int128>(a.den_) * b.num_);
}

bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
}

Rational Rational::pow(unsigned exponent) const {
    Rational result(1);
    Rational base = *this;
    while (exponent > 0) {
        if (exponent & 1u) result *= base;
        base = (exponent > 1) ? base * base : base;
        exponent >>= 1u;
    }
    return result;
}

double Rational::to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
}

std::string Rational::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(std::string_view text) {
    auto fail = [&] { throw DomainError("cannot parse rational from '" + std::string(text) + "'"); };

    std::size_t pos = 0;
    bool negative = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        negative = text[pos] == '-';
        ++pos;
    }

    auto read_digits = [&](std::int64_t& out, std::size_t max_digits) -> std::size_t {
        std::size_t count = 0;
        out = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            if (count >= max_digits) throw OverflowError("too many digits in rational literal");
            out = out * 10 + (text[pos] - '0');
            ++pos;
            ++count;
        }
        return count;
    };

    std::int64_t intpart = 0;
    std::size_t intdigits = read_digits(intpart, 18);

    if (pos < text.size() && text[pos] == '/') {
        ++pos;
        std::int64_t den = 0;
        if (read_digits(den, 18) == 0 || pos != text.size() || intdigits == 0) fail();
        return Rational(negative ? -intpart : intpart, den);
    }

    std::int64_t frac = 0;
    std::size_t fracdigits = 0;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        fracdigits = read_digits(frac, 12);
    }
    if (pos != text.size() || (intdigits == 0 && fracdigits == 0)) fail();

    __int128 den = 1;
    for (std::size_t i = 0; i < fracdigits; ++i) den *= 10;
    __int128 num = static_cast<__int128>(intpart) * den + frac;
    return from_ratio(negative ? -num : num, den);
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.str();
}

} // namespace ambilab
