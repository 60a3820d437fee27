#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

namespace rff {

/// Exact rational with arbitrary-precision numerator and denominator.
/// Always stored reduced with a positive denominator.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline std::string to_string(const BigInt& value) {
    // str() divides digit by digit; small values are the common case.
    if (value >= std::numeric_limits<long long>::min() && value <= std::numeric_limits<long long>::max()) {
        return std::to_string(value.convert_to<long long>());
    }
    return value.str();
}

inline std::string to_string(const Rational& value) {
    const BigInt num = boost::multiprecision::numerator(value);
    const BigInt den = boost::multiprecision::denominator(value);
    if (den == 1) return to_string(num);
    return to_string(num) + "/" + to_string(den);
}

/// Parses "n", "-n" or "n/d". Returns nullopt on anything else.
inline std::optional<Rational> parse_rational(std::string_view text) {
    auto parse_int = [](std::string_view t) -> std::optional<BigInt> {
        if (t.empty()) return std::nullopt;
        std::size_t start = (t[0] == '-' || t[0] == '+') ? 1 : 0;
        if (start == t.size()) return std::nullopt;
        for (std::size_t i = start; i < t.size(); ++i) {
            if (t[i] < '0' || t[i] > '9') return std::nullopt;
        }
        BigInt value(std::string(t[0] == '+' ? t.substr(1) : t));
        return value;
    };
    auto slash = text.find('/');
    if (slash == std::string_view::npos) {
        auto n = parse_int(text);
        if (!n) return std::nullopt;
        return Rational(*n);
    }
    auto n = parse_int(text.substr(0, slash));
    auto d = parse_int(text.substr(slash + 1));
    if (!n || !d || *d == 0) return std::nullopt;
    return Rational(*n, *d);
}

}  // namespace rff
