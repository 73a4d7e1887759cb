#pragma once

// Block geometry and block sums for the interlaced construction: a series of
// length n is cut into 2k consecutive blocks of length m, and only every
// other block (the 1st, 3rd, ...) contributes a sum Y_j.  The discarded gap
// blocks are what buys near-independence between the retained ones when the
// series is weakly dependent.

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "selfnorm/errors.hpp"

namespace selfnorm {

struct BlockPlan {
    std::size_t n = 0; // series length
    std::size_t m = 0; // block length
    std::size_t k = 0; // number of retained blocks, k = floor(n / (2m))
    std::optional<double> alpha; // set when m came from m = floor(n^alpha)
};

namespace detail {

inline BlockPlan make_plan(std::size_t n, std::size_t m,
                           std::optional<double> alpha) {
    if (n < 2) throw config_error("plan_blocks: n must be at least 2");
    if (m < 1) throw config_error("plan_blocks: m must be positive");
    const std::size_t k = n / (2 * m);
    if (k < 1)
        throw config_error("plan_blocks: n too small for block length m "
                           "(needs n >= 2m)");
    return BlockPlan{n, m, k, alpha};
}

} // namespace detail

// m supplied directly.
inline BlockPlan plan_blocks(std::size_t n, std::size_t m) {
    return detail::make_plan(n, m, std::nullopt);
}

// m from the block exponent: m = floor(n^alpha).
inline BlockPlan plan_blocks_alpha(std::size_t n, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw config_error("plan_blocks: alpha must lie in (0,1)");
    const auto m = static_cast<std::size_t>(
        std::floor(std::pow(static_cast<double>(n), alpha)));
    return detail::make_plan(n, m < 1 ? 1 : m, alpha);
}

struct BlockSums {
    std::vector<double> y; // Y_1..Y_k
    BlockPlan plan;
};

// Y_j = sum of series[2m(j-1) + i] for i = 1..m (1-based as usual in the
// literature); blocks at odd positions only, gaps discarded.
inline BlockSums interlaced_sums(const std::vector<double>& series,
                                 const BlockPlan& plan) {
    const std::size_t need = 2 * plan.m * (plan.k - 1) + plan.m;
    if (series.size() < need)
        throw config_error("interlaced_sums: series shorter than the last "
                           "retained block");
    BlockSums out;
    out.plan = plan;
    out.y.resize(plan.k);
    for (std::size_t j = 0; j < plan.k; ++j) {
        const std::size_t base = 2 * plan.m * j;
        double acc = 0.0;
        for (std::size_t i = 0; i < plan.m; ++i) acc += series[base + i];
        out.y[j] = acc;
    }
    return out;
}

// Diagnostic variant: consecutive length-m blocks with no gaps (k blocks use
// the first m*k entries).  Not part of the interlaced statistic's contract;
// exposed for comparison studies of blocking layouts.
inline BlockSums consecutive_sums(const std::vector<double>& series,
                                  std::size_t m, std::size_t k) {
    if (m < 1 || k < 1)
        throw config_error("consecutive_sums: m and k must be positive");
    if (series.size() < m * k)
        throw config_error("consecutive_sums: series shorter than m*k");
    BlockSums out;
    out.plan = BlockPlan{series.size(), m, k, std::nullopt};
    out.y.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) acc += series[m * j + i];
        out.y[j] = acc;
    }
    return out;
}

} // namespace selfnorm
