#pragma once

// Continued-fraction expansions via the Gauss map on exact rationals, the
// Gauss-measure digit law, the truncated digit-power mean, and the pi/10000
// sample grid the simulation study runs on.
//
// Digits are produced by integer Euclidean division, which is the Gauss map
// T(x) = 1/x - floor(1/x) evaluated without rounding error; a float64 orbit
// iterator is also provided, clearly marked as non-exact, for diagnosing what
// accumulated floating-point error does to deep digits.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "selfnorm/errors.hpp"
#include "selfnorm/kahan.hpp"
#include "selfnorm/rational.hpp"

namespace selfnorm {

struct CfDigits {
    std::vector<std::int64_t> digits; // partial quotients a_1, a_2, ...
    bool terminated = false;          // rational inputs always terminate
};

// Exact expansion of x in (0,1): a = floor(q/p) for x = p/q, then
// (p,q) <- (q - a p, p), until p = 0 or max_terms digits.
inline CfDigits cf_digits(const BigRational& x, std::size_t max_terms) {
    if (!(x > 0 && x < 1))
        throw config_error("cf_digits: x must lie strictly inside (0,1)");
    BigInt p = boost::multiprecision::numerator(x);
    BigInt q = boost::multiprecision::denominator(x);
    CfDigits out;
    out.digits.reserve(max_terms);
    while (p != 0 && out.digits.size() < max_terms) {
        const BigInt a = q / p;
        out.digits.push_back(static_cast<std::int64_t>(a));
        const BigInt r = q - a * p;
        q = p;
        p = r;
    }
    out.terminated = (p == 0);
    return out;
}

// One exact Gauss-map step T(x) = 1/x - floor(1/x); digit is floor(1/x).
// Used by tests to confirm the Euclid form above is the same map.
inline std::int64_t gauss_step(BigRational& x) {
    const BigInt a = boost::multiprecision::denominator(x) /
                     boost::multiprecision::numerator(x);
    x = BigRational(1) / x - BigRational(a);
    return static_cast<std::int64_t>(a);
}

// Fold digits back into a rational: exact inverse of cf_digits for
// terminated expansions.
inline BigRational cf_fold(const std::vector<std::int64_t>& digits) {
    if (digits.empty())
        throw config_error("cf_fold: need at least one digit");
    BigRational x(0);
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        if (*it < 1) throw config_error("cf_fold: digits must be >= 1");
        x = BigRational(1) / (BigRational(*it) + x);
    }
    return x;
}

// Invariant-measure mass of {first digit = j}: ln(1 + 1/(j(j+2))) / ln 2.
inline double gauss_mass(std::int64_t j) {
    if (j < 1) throw config_error("gauss_mass: j must be positive");
    const double jd = static_cast<double>(j);
    return std::log1p(1.0 / (jd * (jd + 2.0))) / 0.69314718055994530942;
}

// Sum of the first J masses, accumulated term by term; telescopes to
// ln(2(J+1)/(J+2)) / ln 2 exactly, which the tests verify independently.
inline double gauss_partial_sum(std::int64_t J) {
    if (J < 1) throw config_error("gauss_partial_sum: J must be positive");
    KahanSum acc;
    for (std::int64_t j = 1; j <= J; ++j) acc.add(gauss_mass(j));
    return acc.value();
}

// Truncated mean of digit^exponent under the invariant measure:
//   (1/ln 2) * sum_{j=1..J} j^exponent * ln(1 + 1/(j(j+2))).
// Accumulated in extended precision, rounded once at the end.
inline double mu_truncated(std::int64_t J, double exponent) {
    if (J < 1) throw config_error("mu_truncated: J must be positive");
    if (!(exponent > 0.0 && exponent < 1.0))
        throw config_error("mu_truncated: exponent must lie in (0,1)");
    long double acc = 0.0L;
    for (std::int64_t j = 1; j <= J; ++j) {
        const long double jd = static_cast<long double>(j);
        acc += std::pow(jd, static_cast<long double>(exponent)) *
               std::log1p(1.0L / (jd * (jd + 2.0L)));
    }
    return static_cast<double>(acc / 0.693147180559945309417232L);
}

namespace detail {

// pi to 200 and 300 significant decimal digits, stored as integer digit
// strings (value = digits / 10^(len-1)).  The 300-digit constant exists so
// grid expansions can be cross-checked at a higher precision.
inline const char* kPi200 =
    "3141592653589793238462643383279502884197169399375105820974944592307816"
    "4062862089986280348253421170679821480865132823066470938446095505822317"
    "253594081284811174502841027019385211055596446229489549303819";
inline const char* kPi300 =
    "3141592653589793238462643383279502884197169399375105820974944592307816"
    "4062862089986280348253421170679821480865132823066470938446095505822317"
    "2535940812848111745028410270193852110555964462294895493038196442881097"
    "5665933446128475648233786783165271201909145648566923460348610454326648"
    "21339360726024914127";

} // namespace detail

// Rational approximation of pi with `precision` significant digits
// (precision is 200 or 300).
inline BigRational pi_rational(unsigned precision = 200) {
    const char* digits;
    if (precision == 200) digits = detail::kPi200;
    else if (precision == 300) digits = detail::kPi300;
    else throw config_error("pi_rational: precision must be 200 or 300");
    return BigRational(BigInt(std::string(digits)), pow10(precision - 1));
}

// Grid point index * pi / 10000 as an exact rational; 1 <= index <= 3182
// keeps the value inside (0,1).
inline constexpr std::int64_t kGridSize = 3182;

inline BigRational pi_grid_point(std::int64_t index, unsigned precision = 200) {
    if (index < 1 || index > kGridSize)
        throw config_error("pi_grid_point: index must lie in [1, 3182]");
    return pi_rational(precision) * BigRational(index, 10000);
}

// zeta_i = a_i(x)^exponent for the first n digits of grid point `index`,
// uncentered (callers subtract m*mu downstream, keeping one centering path).
inline std::vector<double> cf_series(std::int64_t index, std::size_t n,
                                     double exponent,
                                     unsigned precision = 200) {
    const CfDigits d = cf_digits(pi_grid_point(index, precision), n);
    if (d.digits.size() < n)
        throw precision_error("cf_series: expansion terminated before " +
                              std::to_string(n) + " digits");
    std::vector<double> zeta(n);
    for (std::size_t i = 0; i < n; ++i)
        zeta[i] = std::pow(static_cast<double>(d.digits[i]), exponent);
    return zeta;
}

// ---------------------------------------------------------------------------
// Non-exact diagnostic: iterate the Gauss map in plain double precision.
// Roundoff compounds roughly one decimal digit per step, so digits beyond
// position ~14 bear no relation to the exact expansion.  Kept (and clearly
// fenced off) because it is the classic way such simulations get computed,
// and comparing it against the exact pipeline quantifies the damage.
// ---------------------------------------------------------------------------
inline std::vector<std::int64_t> float_orbit_digits(double x,
                                                    std::size_t depth) {
    if (!(x > 0.0 && x < 1.0))
        throw config_error("float_orbit_digits: x must lie inside (0,1)");
    std::vector<std::int64_t> out(depth);
    for (std::size_t i = 0; i < depth; ++i) {
        const double inv = 1.0 / x;
        double a = std::floor(inv);
        if (a < 1.0) a = 1.0; // guard against drift below 1
        out[i] = static_cast<std::int64_t>(a);
        x = inv - a;
        if (x <= 0.0) x = 1e-17; // keep the orbit inside (0,1)
    }
    return out;
}

inline std::vector<double> float_orbit_series(std::int64_t index,
                                              std::size_t n, double exponent) {
    if (index < 1 || index > kGridSize)
        throw config_error("float_orbit_series: index must lie in [1, 3182]");
    const double x0 =
        static_cast<double>(index) * 3.141592653589793 / 10000.0;
    const auto digits = float_orbit_digits(x0, n);
    std::vector<double> zeta(n);
    for (std::size_t i = 0; i < n; ++i)
        zeta[i] = std::pow(static_cast<double>(digits[i]), exponent);
    return zeta;
}

} // namespace selfnorm
