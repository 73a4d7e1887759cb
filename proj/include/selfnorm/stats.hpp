#pragma once

// Self-normalized and Studentized statistics over block sums, the exact
// threshold map linking their tail events, and the conservative confidence
// interval built from them.

#include <cmath>
#include <vector>

#include "selfnorm/blocks.hpp"
#include "selfnorm/errors.hpp"
#include "selfnorm/kahan.hpp"
#include "selfnorm/normal.hpp"

namespace selfnorm {

// W = sum(Y_j - c) / sqrt(sum((Y_j - c)^2)), with c = 0 when absent.
// Compensated sums keep the value independent of accumulation order.
inline double self_norm_stat(const BlockSums& sums, double center = 0.0) {
    KahanSum s, q;
    for (double y : sums.y) {
        const double z = y - center;
        s.add(z);
        q.add(z * z);
    }
    const double denom_sq = q.value();
    if (denom_sq <= 0.0)
        throw degenerate_error("self_norm_stat: zero sum of squares");
    return s.value() / std::sqrt(denom_sq);
}

// T = sum(Y_j - m*mu) / sqrt(sum((Y_j - Ybar)^2)): centered numerator over
// the empirical spread around the block mean.
inline double student_stat(const BlockSums& sums, double block_mean) {
    const std::size_t k = sums.y.size();
    if (k < 2)
        throw config_error("student_stat: needs at least two blocks");
    KahanSum total;
    for (double y : sums.y) total.add(y);
    const double ybar = total.value() / static_cast<double>(k);
    KahanSum num, spread;
    for (double y : sums.y) {
        num.add(y - block_mean);
        const double d = y - ybar;
        spread.add(d * d);
    }
    const double denom_sq = spread.value();
    if (denom_sq <= 0.0)
        throw degenerate_error("student_stat: constant block sums");
    return num.value() / std::sqrt(denom_sq);
}

// Exact tail-event transfer between T and W computed on the same blocks with
// the same known center m*mu.  With S = sum(Y - m mu) and Q = sum((Y - m mu)^2),
// the spread identity sum((Y - Ybar)^2) = Q - S^2/k gives
//     T = W * sqrt(k / (k - W^2)),
// a strictly increasing bijection from W in (-sqrt(k), sqrt(k)) onto all of R.
// Inverting it at x yields the threshold below:
//     {T >= x}  <=>  {W >= x * sqrt(k / (k + x^2))},   any x >= 0.
// The threshold is strictly increasing in x and approaches sqrt(k) from below,
// mirroring the Cauchy-Schwarz range |W| <= sqrt(k).
inline double chung_threshold(double x, std::size_t k) {
    if (x < 0.0)
        throw config_error("chung_threshold: x must be nonnegative");
    if (k < 2)
        throw config_error("chung_threshold: k must be at least 2");
    const double kd = static_cast<double>(k);
    return x * std::sqrt(kd / (kd + x * x));
}

struct IntervalEstimate {
    double lo = 0.0;
    double hi = 0.0;
    double level = 0.0; // 1 - delta; 0 marks the degenerate delta = 1 case
};

// Conservative interval for the per-observation mean mu:
//   center    = sum(Y_j) / (k m)
//   halfwidth = Phi^{-1}(1 - delta/2) * sqrt(sum((Y_j - Ybar)^2)) / (k m)
// delta = 1 is allowed and collapses the interval onto its center.
inline IntervalEstimate confidence_interval(const BlockSums& sums,
                                            double delta) {
    if (!(delta > 0.0 && delta <= 1.0))
        throw config_error("confidence_interval: delta must lie in (0,1]");
    const std::size_t k = sums.y.size();
    if (k < 2)
        throw config_error("confidence_interval: needs at least two blocks");
    const double km = static_cast<double>(k) * static_cast<double>(sums.plan.m);

    KahanSum total;
    for (double y : sums.y) total.add(y);
    const double center = total.value() / km;

    const double ybar = total.value() / static_cast<double>(k);
    KahanSum spread;
    for (double y : sums.y) {
        const double d = y - ybar;
        spread.add(d * d);
    }
    const double half =
        quantile(1.0 - delta / 2.0) * std::sqrt(spread.value()) / km;

    IntervalEstimate est;
    est.lo = center - half;
    est.hi = center + half;
    est.level = 1.0 - delta;
    return est;
}

} // namespace selfnorm
