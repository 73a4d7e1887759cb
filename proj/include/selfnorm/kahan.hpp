#pragma once

#include <cmath>

namespace selfnorm {

// Neumaier-compensated accumulator.  The ratio tables count events like
// {W >= t}, and W sits on a quotient of two long sums, so we keep the sums
// order-insensitive to the last ulp rather than trusting naive accumulation.
class KahanSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace selfnorm
