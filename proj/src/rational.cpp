#include "credo/rational.hpp"

#include <boost/multiprecision/integer.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>

namespace credo {

namespace {

Int pow10(unsigned e) {
    Int r(1);
    for (unsigned i = 0; i < e; ++i) r *= 10;
    return r;
}

}  // namespace

Rational parse_decimal(std::string_view text) {
    std::size_t pos = 0;
    const std::size_t n = text.size();
    auto fail = [&](const std::string& what) -> ParseError {
        return ParseError("malformed decimal literal at offset " + std::to_string(pos) + ": " + what +
                              " in \"" + std::string(text) + "\"",
                          pos);
    };

    if (n == 0) throw fail("empty string");

    bool negative = false;
    if (text[pos] == '+' || text[pos] == '-') {
        negative = text[pos] == '-';
        ++pos;
    }

    Int digits(0);
    std::size_t int_digits = 0;
    while (pos < n && text[pos] >= '0' && text[pos] <= '9') {
        digits = digits * 10 + (text[pos] - '0');
        ++int_digits;
        ++pos;
    }

    std::size_t frac_digits = 0;
    if (pos < n && text[pos] == '.') {
        ++pos;
        while (pos < n && text[pos] >= '0' && text[pos] <= '9') {
            digits = digits * 10 + (text[pos] - '0');
            ++frac_digits;
            ++pos;
        }
        if (frac_digits == 0) throw fail("expected digits after '.'");
    }
    if (int_digits == 0 && frac_digits == 0) throw fail("expected digits");

    long exponent = 0;
    if (pos < n && (text[pos] == 'e' || text[pos] == 'E')) {
        ++pos;
        bool exp_neg = false;
        if (pos < n && (text[pos] == '+' || text[pos] == '-')) {
            exp_neg = text[pos] == '-';
            ++pos;
        }
        if (pos >= n || text[pos] < '0' || text[pos] > '9') throw fail("expected exponent digits");
        long e = 0;
        while (pos < n && text[pos] >= '0' && text[pos] <= '9') {
            e = e * 10 + (text[pos] - '0');
            if (e > 1000000) throw fail("exponent out of range");
            ++pos;
        }
        exponent = exp_neg ? -e : e;
    }
    if (pos != n) throw fail("unexpected character");

    long scale = exponent - static_cast<long>(frac_digits);
    Rational value(digits);
    if (scale > 0)
        value *= Rational(pow10(static_cast<unsigned>(scale)));
    else if (scale < 0)
        value /= Rational(pow10(static_cast<unsigned>(-scale)));
    if (negative) value = -value;
    return value;
}

std::optional<std::string> to_exact_decimal(const Rational& r, int max_significant) {
    Int num = boost::multiprecision::numerator(r);
    Int den = boost::multiprecision::denominator(r);
    bool negative = num < 0;
    if (negative) num = -num;

    // The expansion terminates iff den = 2^a * 5^b.
    unsigned a = 0, b = 0;
    Int d = den;
    while (d % 2 == 0) {
        d /= 2;
        ++a;
    }
    while (d % 5 == 0) {
        d /= 5;
        ++b;
    }
    if (d != 1) return std::nullopt;

    unsigned k = std::max(a, b);  // digits after the decimal point
    Int scaled = num * pow10(k) / den;
    std::string digits = scaled.str();
    if (static_cast<int>(digits.size()) > max_significant + static_cast<int>(k) ||
        (k == 0 && static_cast<int>(digits.size()) > max_significant))
        return std::nullopt;

    std::string out;
    if (negative && scaled != 0) out += '-';
    if (k == 0) {
        if (static_cast<int>(digits.size()) > max_significant) return std::nullopt;
        out += digits;
        return out;
    }
    // Insert the decimal point, trimming trailing zeros.
    if (digits.size() <= k) digits.insert(0, k + 1 - digits.size(), '0');
    std::string int_part = digits.substr(0, digits.size() - k);
    std::string frac_part = digits.substr(digits.size() - k);
    while (!frac_part.empty() && frac_part.back() == '0') frac_part.pop_back();
    std::string significant = int_part + frac_part;
    std::size_t lead = 0;
    while (lead + 1 < significant.size() && significant[lead] == '0') ++lead;
    if (static_cast<int>(significant.size() - lead) > max_significant) return std::nullopt;
    out += int_part;
    if (!frac_part.empty()) {
        out += '.';
        out += frac_part;
    }
    return out;
}

std::string to_fraction_literal(const Rational& r) {
    Int num = boost::multiprecision::numerator(r);
    Int den = boost::multiprecision::denominator(r);
    return "(" + num.str() + "/" + den.str() + ")";
}

std::string to_annotation_literal(const Rational& r) {
    if (auto dec = to_exact_decimal(r)) return *dec;
    return to_fraction_literal(r);
}

double to_double(const Rational& r) {
    using boost::multiprecision::msb;
    Int num = boost::multiprecision::numerator(r);
    Int den = boost::multiprecision::denominator(r);
    if (num == 0) return 0.0;
    bool negative = num < 0;
    if (negative) num = -num;

    // Find s such that q = floor(num * 2^s / den) has exactly 53 bits, then
    // round to nearest (ties to even) on the exact remainder.
    long L = static_cast<long>(msb(num)) - static_cast<long>(msb(den));
    long s = 53 - L;
    Int q, rem, scaled_den;
    for (;;) {
        Int scaled_num = num;
        scaled_den = den;
        if (s >= 0)
            scaled_num <<= static_cast<unsigned>(s);
        else
            scaled_den <<= static_cast<unsigned>(-s);
        boost::multiprecision::divide_qr(scaled_num, scaled_den, q, rem);
        long bits = static_cast<long>(msb(q)) + 1;
        if (bits < 53) {
            s += 53 - bits;
        } else if (bits > 53) {
            s -= bits - 53;
        } else {
            break;
        }
    }
    Int twice_rem = rem * 2;
    if (twice_rem > scaled_den || (twice_rem == scaled_den && (q & 1) != 0)) ++q;
    double result = std::ldexp(static_cast<double>(q), static_cast<int>(-s));
    return negative ? -result : result;
}

std::string to_display_decimal(const Rational& r) {
    double v = to_double(r);
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("rational_from_double: non-finite value");
    if (x == 0.0) return Rational(0);
    int exp = 0;
    double m = std::frexp(x, &exp);  // x = m * 2^exp, |m| in [0.5, 1)
    Int mant = static_cast<long long>(std::ldexp(m, 53));
    exp -= 53;
    Rational r(mant);
    if (exp > 0)
        r *= Rational(Int(1) << static_cast<unsigned>(exp));
    else if (exp < 0)
        r /= Rational(Int(1) << static_cast<unsigned>(-exp));
    return r;
}

namespace {

// floor(sqrt(n)) for n >= 0.
Int isqrt_floor(const Int& n) { return boost::multiprecision::sqrt(n); }

}  // namespace

Rational sqrt_lower(const Rational& r, unsigned precision_bits) {
    if (r < 0) throw std::domain_error("sqrt of negative rational");
    if (r == 0) return Rational(0);
    Int num = boost::multiprecision::numerator(r);
    Int den = boost::multiprecision::denominator(r);
    // sqrt(num/den) = sqrt(num*den) / den; scale by 4^k for precision.
    Int scaled = num * den << (2 * precision_bits);
    Int root = isqrt_floor(scaled);
    return Rational(root) / Rational(den << precision_bits);
}

Rational sqrt_upper(const Rational& r, unsigned precision_bits) {
    if (r < 0) throw std::domain_error("sqrt of negative rational");
    if (r == 0) return Rational(0);
    Int num = boost::multiprecision::numerator(r);
    Int den = boost::multiprecision::denominator(r);
    Int scaled = num * den << (2 * precision_bits);
    Int root = isqrt_floor(scaled);
    if (root * root < scaled) ++root;
    return Rational(root) / Rational(den << precision_bits);
}

}  // namespace credo
