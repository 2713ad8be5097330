#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace credo {

using Int = boost::multiprecision::cpp_int;

// Exact rational scalar, kept in lowest terms with a positive denominator
// (canonical form is maintained by the backend).
using Rational = boost::multiprecision::cpp_rational;

class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, std::size_t offset)
        : std::runtime_error(std::move(message)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// Parses a decimal literal (optional sign, digits, optional fractional part,
// optional decimal exponent) into an exact rational. "564.48" -> 14112/25.
Rational parse_decimal(std::string_view text);

// Renders r as the shortest terminating decimal without an exponent, if the
// expansion terminates within `max_significant` significant digits. Returns
// nullopt otherwise (caller falls back to fraction form).
std::optional<std::string> to_exact_decimal(const Rational& r, int max_significant = 17);

// Fraction literal "(num/den)"; always losslessly reparsable.
std::string to_fraction_literal(const Rational& r);

// Exact decimal when it exists, otherwise the fraction literal.
std::string to_annotation_literal(const Rational& r);

// Nearest double (round to nearest, ties to even).
double to_double(const Rational& r);

// Shortest decimal string that round-trips through to_double(r). This is the
// human-facing rendering used in reports and golden-value comparisons.
std::string to_display_decimal(const Rational& r);

// Exact rational value of a finite double.
Rational rational_from_double(double x);

// Rational bracketing of sqrt(r) for r >= 0: returns lo, hi with
// lo*lo <= r <= hi*hi and hi - lo <= hi * 2^-precision_bits.
Rational sqrt_lower(const Rational& r, unsigned precision_bits = 48);
Rational sqrt_upper(const Rational& r, unsigned precision_bits = 48);

}  // namespace credo
