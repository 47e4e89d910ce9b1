#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace timesplit {

/// Exact time value. Model constants are decimal literals, so 64-bit
/// numerators and denominators are ample for every bound the state-class
/// analysis derives from them.
using Rational = boost::rational<std::int64_t>;

/// Parses a decimal literal ("12", "9.8", "1e-3", "-0.25") or a fraction
/// ("49/5") into an exact rational. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

/// "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& value);

/// Exact decimal rendering ("9.8"). Falls back to "p/q" when the value has
/// no terminating decimal expansion.
std::string to_decimal_string(const Rational& value);

double to_double(const Rational& value);

/// Smallest multiple of 1/denominator that is >= value.
Rational round_up(double value, std::int64_t denominator);

/// Three-way comparison by 128-bit cross multiplication (denominators are
/// always positive in boost::rational).
inline int compare(const Rational& a, const Rational& b) {
    const __int128 lhs = static_cast<__int128>(a.numerator()) * b.denominator();
    const __int128 rhs = static_cast<__int128>(b.numerator()) * a.denominator();
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

}  // namespace timesplit
