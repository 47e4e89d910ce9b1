#include "timesplit/rational.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace timesplit {

namespace {

std::int64_t pow10(int exponent) {
    std::int64_t result = 1;
    for (int i = 0; i < exponent; ++i) {
        if (result > std::numeric_limits<std::int64_t>::max() / 10) {
            throw std::invalid_argument("numeric literal out of range");
        }
        result *= 10;
    }
    return result;
}

std::int64_t parse_integer(std::string_view digits) {
    if (digits.empty()) {
        throw std::invalid_argument("expected digits");
    }
    std::int64_t value = 0;
    for (char c : digits) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            throw std::invalid_argument("unexpected character '" + std::string(1, c) + "' in number");
        }
        if (value > (std::numeric_limits<std::int64_t>::max() - (c - '0')) / 10) {
            throw std::invalid_argument("numeric literal out of range");
        }
        value = value * 10 + (c - '0');
    }
    return value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    if (text.empty()) {
        throw std::invalid_argument("empty numeric literal");
    }
    bool negative = false;
    if (text.front() == '-' || text.front() == '+') {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        const auto num = parse_integer(text.substr(0, slash));
        const auto den = parse_integer(text.substr(slash + 1));
        if (den == 0) {
            throw std::invalid_argument("zero denominator");
        }
        return Rational(negative ? -num : num, den);
    }

    int exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
        auto exp_text = text.substr(e + 1);
        bool exp_negative = false;
        if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
            exp_negative = exp_text.front() == '-';
            exp_text.remove_prefix(1);
        }
        const auto magnitude = parse_integer(exp_text);
        if (magnitude > 18) {
            throw std::invalid_argument("exponent out of range");
        }
        exponent = static_cast<int>(exp_negative ? -magnitude : magnitude);
        text = text.substr(0, e);
    }

    std::string_view whole = text;
    std::string_view fraction;
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        whole = text.substr(0, dot);
        fraction = text.substr(dot + 1);
        if (whole.empty() && fraction.empty()) {
            throw std::invalid_argument("expected digits");
        }
    }
    const std::int64_t whole_value = whole.empty() ? 0 : parse_integer(whole);
    const std::int64_t fraction_value = fraction.empty() ? 0 : parse_integer(fraction);
    const std::int64_t scale = pow10(static_cast<int>(fraction.size()));

    Rational value = Rational(whole_value) + Rational(fraction_value, scale);
    if (exponent > 0) {
        value *= pow10(exponent);
    } else if (exponent < 0) {
        value /= pow10(-exponent);
    }
    return negative ? -value : value;
}

std::string to_string(const Rational& value) {
    if (value.denominator() == 1) {
        return std::to_string(value.numerator());
    }
    return std::to_string(value.numerator()) + "/" + std::to_string(value.denominator());
}

std::string to_decimal_string(const Rational& value) {
    std::int64_t den = value.denominator();
    int twos = 0;
    int fives = 0;
    while (den % 2 == 0) {
        den /= 2;
        ++twos;
    }
    while (den % 5 == 0) {
        den /= 5;
        ++fives;
    }
    if (den != 1) {
        return to_string(value);
    }
    const int digits = std::max(twos, fives);
    if (digits == 0) {
        return std::to_string(value.numerator());
    }
    const Rational scaled = value * pow10(digits);
    std::int64_t magnitude = scaled.numerator();
    const bool negative = magnitude < 0;
    if (negative) {
        magnitude = -magnitude;
    }
    std::string text = std::to_string(magnitude);
    if (static_cast<int>(text.size()) <= digits) {
        text.insert(0, static_cast<std::size_t>(digits + 1) - text.size(), '0');
    }
    text.insert(text.size() - static_cast<std::size_t>(digits), ".");
    return negative ? "-" + text : text;
}

double to_double(const Rational& value) {
    return static_cast<double>(value.numerator()) / static_cast<double>(value.denominator());
}

Rational round_up(double value, std::int64_t denominator) {
    const double scaled = std::ceil(value * static_cast<double>(denominator));
    return Rational(static_cast<std::int64_t>(scaled), denominator);
}

}  // namespace timesplit
