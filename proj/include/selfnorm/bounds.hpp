#pragma once

// Theoretical bound evaluators: combined mixing-rate quantities, the
// moderate-deviation error envelope for the interlaced self-normalized
// statistic, an exponential tail inequality, and the quadratic rate
// functional over interval sets.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "selfnorm/blocks.hpp"
#include "selfnorm/errors.hpp"

namespace selfnorm {

// Tabulated uniform-mixing coefficients psi(gap).  `certified` marks values
// computed exactly from a known model (as opposed to assumed).  `zero_fill`
// makes every untabulated gap read as 0 — the independent-source profile.
struct MixingProfile {
    std::map<std::uint64_t, double> psi;
    bool certified = false;
    bool zero_fill = false;

    double at(std::uint64_t gap) const {
        auto it = psi.find(gap);
        if (it != psi.end()) return it->second;
        if (zero_fill) return 0.0;
        throw config_error("mixing profile: no value tabulated for gap " +
                           std::to_string(gap));
    }

    static MixingProfile zero() {
        MixingProfile p;
        p.zero_fill = true;
        return p;
    }

    static MixingProfile from_values(const std::vector<double>& values,
                                     bool certified_values) {
        MixingProfile p;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (values[i] < 0.0)
                throw config_error("mixing profile: negative coefficient");
            p.psi[i + 1] = values[i];
        }
        p.certified = certified_values;
        return p;
    }
};

struct MixingRates {
    double delta_n = 0.0;
    double gamma_n = 0.0;
    std::uint64_t m = 0;
    std::uint64_t k = 0;
};

// delta_n = sqrt(m psi(m)^2 + k psi(m));  gamma_n = sqrt(k) sqrt(psi(m))
// + n psi(m).  Both vanish for an independent source and control how far
// the blocked statistic sits from its independent-blocks idealization.
inline MixingRates mixing_rates(const BlockPlan& plan,
                                const MixingProfile& profile) {
    const double psi_m = profile.at(plan.m);
    MixingRates r;
    r.m = plan.m;
    r.k = plan.k;
    const double m = static_cast<double>(plan.m);
    const double k = static_cast<double>(plan.k);
    const double n = static_cast<double>(plan.n);
    r.delta_n = std::sqrt(m * psi_m * psi_m + k * psi_m);
    r.gamma_n = std::sqrt(k) * std::sqrt(psi_m) + n * psi_m;
    return r;
}

struct BoundConfig {
    std::uint64_t n = 0;
    double alpha = 0.0;  // block exponent, in (0, 1)
    double rho = 1.0;    // moment-decay parameter, in (0, 1]
    double c = 1.0;      // leading constant, caller-supplied
    MixingProfile profile = MixingProfile::zero();

    void validate() const {
        if (n < 2) throw config_error("bound config: n must be >= 2");
        if (!(alpha > 0.0 && alpha < 1.0))
            throw config_error("bound config: alpha must lie in (0, 1)");
        if (!(rho > 0.0 && rho <= 1.0))
            throw config_error("bound config: rho must lie in (0, 1]");
        if (!(c > 0.0))
            throw config_error("bound config: leading constant must be > 0");
    }
};

struct BoundValue {
    double value = 0.0;
    bool in_range = true;  // x < n^{(1-alpha)/2}, where the bound is meaningful
};

// Relative-error envelope for the tail-probability ratio of the interlaced
// self-normalized statistic against the normal tail.  Two shapes:
//
//   rho < 1:  c * ( x^{2+rho} / n^{(1-a)rho/2}  +  x^2 delta^2
//               + (1+x) * ( 1 / (n^{(1-a)rho(2-rho)/8} (1 + x^{rho(2+rho)/4}))
//                           + gamma ) )
//   rho = 1:  same with x^3 / n^{(1-a)/2} leading and an extra
//             ln(n) / n^{(1-a)/2} inside the (1+x) factor.
//
// The function is total: x at or beyond n^{(1-a)/2} still evaluates, with
// in_range flipped off so sweep tools can flag the region.
inline BoundValue cmd_bound(double x, const BoundConfig& cfg) {
    cfg.validate();
    if (!(x >= 0.0)) throw config_error("cmd_bound: x must be >= 0");

    const double n = static_cast<double>(cfg.n);
    const double a = cfg.alpha;
    const double rho = cfg.rho;
    const auto plan = plan_blocks_alpha(cfg.n, a);
    const MixingRates rates = mixing_rates(plan, cfg.profile);
    const double delta2 = rates.delta_n * rates.delta_n;

    const double lead = std::pow(x, 2.0 + rho) /
                        std::pow(n, (1.0 - a) * rho / 2.0);
    const double small_x =
        1.0 / (std::pow(n, (1.0 - a) * rho * (2.0 - rho) / 8.0) *
               (1.0 + std::pow(x, rho * (2.0 + rho) / 4.0)));
    double inner = small_x + rates.gamma_n;
    if (rho == 1.0) inner += std::log(n) / std::pow(n, (1.0 - a) / 2.0);

    BoundValue out;
    out.value = cfg.c * (lead + x * x * delta2 + (1.0 + x) * inner);
    out.in_range = x < std::pow(n, (1.0 - a) / 2.0);
    return out;
}

// C(beta) = beta^{1/(1-beta)} (1 - 1/beta), positive on (1, 2], C(2) = 1/4.
inline double fan_constant(double beta) {
    if (!(beta > 1.0 && beta <= 2.0))
        throw config_error("fan_constant: beta must lie in (1, 2]");
    return std::pow(beta, 1.0 / (1.0 - beta)) * (1.0 - 1.0 / beta);
}

// Exponential tail bound exp(-C(beta) (x/v)^{beta/(beta-1)}), valid for a
// sum with accumulated conditional variance proxy v; strictly decreasing in
// x, increasing in v, and -> 1 as x -> 0+.
inline double fan_exp_bound(double x, double v, double beta) {
    const double c = fan_constant(beta);
    if (!(x > 0.0) || !(v > 0.0))
        throw config_error("fan_exp_bound: x and v must be > 0");
    return std::exp(-c * std::pow(x / v, beta / (beta - 1.0)));
}

// ---------------------------------------------------------------------------
// Interval sets and the quadratic rate functional.

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_closed = true;
    bool hi_closed = true;
};

using IntervalSet = std::vector<Interval>;

namespace detail {

inline void validate_interval(const Interval& iv) {
    if (std::isnan(iv.lo) || std::isnan(iv.hi))
        throw config_error("interval: NaN endpoint");
    if (std::isinf(iv.lo) && iv.lo < 0.0 && iv.lo_closed)
        throw config_error("interval: -inf endpoint must be open");
    if (std::isinf(iv.hi) && iv.hi > 0.0 && iv.hi_closed)
        throw config_error("interval: +inf endpoint must be open");
    if (iv.lo > iv.hi)
        throw config_error("interval: lower endpoint exceeds upper");
    if (iv.lo == iv.hi && !(iv.lo_closed && iv.hi_closed))
        throw config_error("interval: degenerate endpoint must be closed");
}

// Sort by lower endpoint and merge touching pieces ([0,1] u [1,2] -> [0,2])
// so that interiors of glued unions come out right.
inline IntervalSet normalize(IntervalSet set) {
    for (const auto& iv : set) validate_interval(iv);
    if (set.empty()) return set;
    std::sort(set.begin(), set.end(), [](const Interval& a, const Interval& b) {
        if (a.lo != b.lo) return a.lo < b.lo;
        return a.lo_closed && !b.lo_closed;
    });
    IntervalSet merged;
    merged.push_back(set.front());
    for (std::size_t i = 1; i < set.size(); ++i) {
        Interval& last = merged.back();
        const Interval& cur = set[i];
        const bool overlaps =
            cur.lo < last.hi ||
            (cur.lo == last.hi && (cur.lo_closed || last.hi_closed));
        if (overlaps) {
            if (cur.hi > last.hi) {
                last.hi = cur.hi;
                last.hi_closed = cur.hi_closed;
            } else if (cur.hi == last.hi) {
                last.hi_closed = last.hi_closed || cur.hi_closed;
            }
        } else {
            merged.push_back(cur);
        }
    }
    return merged;
}

// inf of x^2/2 over the closed hull [lo, hi]; by continuity this equals the
// inf over any dense subset, so open endpoints do not move it.
inline double quad_inf(double lo, double hi) {
    if (lo <= 0.0 && hi >= 0.0) return 0.0;
    const double edge = (hi < 0.0) ? hi : lo;
    return 0.5 * edge * edge;
}

} // namespace detail

enum class SetVariant { interior, closure };

// inf over the interior (resp. closure) of the union, of x^2/2; +inf when
// the requested set is empty.  Degenerate points contribute only to the
// closure.
inline double mdp_rate_interval(const IntervalSet& set, SetVariant which) {
    const IntervalSet merged = detail::normalize(set);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& iv : merged) {
        if (which == SetVariant::interior && iv.lo == iv.hi) continue;
        best = std::min(best, detail::quad_inf(iv.lo, iv.hi));
    }
    return best;
}

// Parse "[1,2]", "(-inf,-1]u[2,inf)", "{3}", with 'u' or 'U' separating
// pieces and case-insensitive inf/+inf/-inf endpoints.
inline IntervalSet parse_interval_set(const std::string& text) {
    IntervalSet out;
    std::size_t pos = 0;
    const auto fail = [&](const std::string& why) -> void {
        throw config_error("interval set '" + text + "': " + why);
    };
    auto skip_ws = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    auto parse_number = [&](bool allow_inf) -> double {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) ||
                text[pos] == '+' || text[pos] == '-' || text[pos] == '.'))
            ++pos;
        std::string tok = text.substr(start, pos - start);
        if (tok.empty()) fail("expected a number");
        std::string low = tok;
        for (char& ch : low) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        if (low == "inf" || low == "+inf")
            return allow_inf ? std::numeric_limits<double>::infinity()
                             : (fail("infinite endpoint not allowed here"), 0.0);
        if (low == "-inf")
            return allow_inf ? -std::numeric_limits<double>::infinity()
                             : (fail("infinite endpoint not allowed here"), 0.0);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            fail("bad number '" + tok + "'");
        }
        if (used != tok.size()) fail("bad number '" + tok + "'");
        return v;
    };

    skip_ws();
    if (pos == text.size()) fail("empty");
    while (pos < text.size()) {
        skip_ws();
        if (pos >= text.size()) break;
        const char open = text[pos];
        if (open == '{') {
            ++pos;
            const double v = parse_number(false);
            skip_ws();
            if (pos >= text.size() || text[pos] != '}') fail("expected '}'");
            ++pos;
            out.push_back({v, v, true, true});
        } else if (open == '[' || open == '(') {
            ++pos;
            const double lo = parse_number(true);
            skip_ws();
            if (pos >= text.size() || text[pos] != ',') fail("expected ','");
            ++pos;
            const double hi = parse_number(true);
            skip_ws();
            if (pos >= text.size() || (text[pos] != ']' && text[pos] != ')'))
                fail("expected ']' or ')'");
            const char close = text[pos];
            ++pos;
            out.push_back({lo, hi, open == '[', close == ']'});
        } else {
            fail(std::string("unexpected character '") + open + "'");
        }
        skip_ws();
        if (pos < text.size()) {
            if (text[pos] == 'u' || text[pos] == 'U') {
                ++pos;
            } else {
                fail(std::string("expected separator 'u', got '") + text[pos] + "'");
            }
        }
    }
    for (const auto& iv : out) detail::validate_interval(iv);
    return out;
}

} // namespace selfnorm
