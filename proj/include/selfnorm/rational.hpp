#pragma once

// Exact rational arithmetic for the continued-fraction machinery.  Backed by
// boost::multiprecision; these aliases plus a couple of helpers are all the
// library needs.

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "selfnorm/errors.hpp"

namespace selfnorm {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

inline BigRational make_rational(const BigInt& num, const BigInt& den) {
    if (den <= 0)
        throw config_error("make_rational: denominator must be positive");
    return BigRational(num, den);
}

// Parse "p/q" (or a bare integer "p").
inline BigRational parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return BigRational(BigInt(text));
        const BigInt num(text.substr(0, slash));
        const BigInt den(text.substr(slash + 1));
        return make_rational(num, den);
    } catch (const std::runtime_error&) {
        throw config_error("parse_rational: cannot parse '" + text + "'");
    }
}

// Power of ten as an exact integer.
inline BigInt pow10(unsigned exponent) {
    BigInt p = 1;
    for (unsigned i = 0; i < exponent; ++i) p *= 10;
    return p;
}

} // namespace selfnorm
