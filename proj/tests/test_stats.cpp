#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "selfnorm/rng.hpp"
#include "selfnorm/stats.hpp"

using namespace selfnorm;

namespace {
BlockSums sums_of(std::vector<double> y) {
    BlockPlan plan;
    plan.n = 2 * y.size();
    plan.m = 1;
    plan.k = y.size();
    return BlockSums{std::move(y), plan};
}
} // namespace

TEST_CASE("self-normalized statistic on hand-checked inputs") {
    CHECK(self_norm_stat(sums_of({1, 1, 1, 1})) == 2.0);
    CHECK(self_norm_stat(sums_of({1, -1})) == 0.0);
    CHECK_THAT(self_norm_stat(sums_of({3, 4})),
               Catch::Matchers::WithinRel(1.4, 1e-15));
    // centering shifts every block sum
    CHECK_THAT(self_norm_stat(sums_of({4, 5}), 1.0),
               Catch::Matchers::WithinRel(1.4, 1e-15));
}

TEST_CASE("degenerate denominators raise the dedicated error") {
    CHECK_THROWS_AS(self_norm_stat(sums_of({0, 0, 0})), degenerate_error);
    CHECK_THROWS_AS(self_norm_stat(sums_of({2, 2}), 2.0), degenerate_error);
    CHECK_THROWS_AS(student_stat(sums_of({5, 5, 5}), 1.0), degenerate_error);
}

TEST_CASE("studentized statistic on hand-checked inputs") {
    CHECK(student_stat(sums_of({1, 2, 3}), 2.0) == 0.0);
    CHECK_THAT(student_stat(sums_of({1, 2, 3}), 1.0),
               Catch::Matchers::WithinRel(2.1213203435596424, 1e-15));
    CHECK_THROWS_AS(student_stat(sums_of({1}), 0.0), config_error);
}

TEST_CASE("statistics are scale invariant") {
    UniformStream u(31, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 2 + static_cast<std::size_t>(u.at(1000 + trial) * 8);
        std::vector<double> y(k);
        for (std::size_t j = 0; j < k; ++j)
            y[j] = 4.0 * u.at(trial * 64 + j) - 2.0;
        const double center = u.at(5000 + trial) - 0.5;
        const double c = 0.1 + 9.9 * u.at(9000 + trial);

        std::vector<double> scaled(k);
        for (std::size_t j = 0; j < k; ++j) scaled[j] = c * y[j];

        const double w1 = self_norm_stat(sums_of(y), center);
        const double w2 = self_norm_stat(sums_of(scaled), c * center);
        CHECK_THAT(w2, Catch::Matchers::WithinAbs(w1, 1e-12));

        const double t1 = student_stat(sums_of(y), center);
        const double t2 = student_stat(sums_of(scaled), c * center);
        CHECK_THAT(t2, Catch::Matchers::WithinAbs(t1, 1e-9 * std::abs(t1) + 1e-12));
    }
}

TEST_CASE("self-normalized statistic is bounded by sqrt(k)") {
    UniformStream u(77, 0);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t k = 2 + static_cast<std::size_t>(u.at(20000 + trial) * 20);
        std::vector<double> y(k);
        for (std::size_t j = 0; j < k; ++j)
            y[j] = 10.0 * u.at(trial * 32 + j) - 5.0;
        const double w = self_norm_stat(sums_of(y), u.at(40000 + trial));
        CHECK(std::abs(w) <=
              std::sqrt(static_cast<double>(k)) * (1.0 + 1e-12));
    }
}

TEST_CASE("threshold map matches its closed form") {
    CHECK(chung_threshold(0.0, 7) == 0.0);
    CHECK_THAT(chung_threshold(1.0, 5),
               Catch::Matchers::WithinRel(0.9128709291752769, 1e-15));
    CHECK_THAT(chung_threshold(1.0, 2),
               Catch::Matchers::WithinRel(0.816496580927726, 1e-15));
    CHECK_THAT(chung_threshold(2.0, 5),
               Catch::Matchers::WithinRel(1.4907119849998598, 1e-15));
    CHECK_THROWS_AS(chung_threshold(-0.5, 5), config_error);
    CHECK_THROWS_AS(chung_threshold(1.0, 1), config_error);

    // strictly increasing in x, image inside [0, sqrt(k))
    for (std::size_t k : {2ul, 3ul, 10ul, 50ul}) {
        double prev = -1.0;
        for (int i = 0; i <= 400; ++i) {
            const double x = 0.05 * i;
            const double w = chung_threshold(x, k);
            CHECK(w > prev);
            CHECK(w < std::sqrt(static_cast<double>(k)));
            prev = w;
        }
    }
}

TEST_CASE("tail events of T and W coincide under the threshold map") {
    // The identity T = W sqrt(k / (k - W^2)) maps {T >= x} to
    // {W >= chung_threshold(x, k)}; checked sample by sample.
    UniformStream u(313, 0);
    int checked = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t k = 2 + static_cast<std::size_t>(u.at(trial) * 30);
        std::vector<double> y(k);
        for (std::size_t j = 0; j < k; ++j)
            y[j] = 6.0 * u.at(100000 + trial * 64 + j) - 3.0;
        const double mmu = 2.0 * u.at(200000 + trial) - 1.0;

        double t, w;
        try {
            t = student_stat(sums_of(y), mmu);
            w = self_norm_stat(sums_of(y), mmu);
        } catch (const degenerate_error&) {
            continue;
        }

        // identity check; the reconstruction w*sqrt(k/(k-w^2)) is
        // ill-conditioned as w^2 -> k (condition number ~ 1 + t^2/k),
        // so the tolerance carries a t^2 term
        const double kd = static_cast<double>(k);
        if (w * w < kd) {
            const double t_from_w = w * std::sqrt(kd / (kd - w * w));
            CHECK_THAT(t_from_w,
                       Catch::Matchers::WithinAbs(
                           t, 1e-9 * (1.0 + std::abs(t) + t * t)));
        }

        for (int g = 0; g <= 8; ++g) {
            const double x = 0.25 * g;
            const bool lhs = t >= x;
            const bool rhs = w >= chung_threshold(x, k);
            CHECK(lhs == rhs);
            ++checked;
        }
    }
    CHECK(checked > 10000);
}

TEST_CASE("confidence interval on hand-checked inputs") {
    // zero spread collapses the interval to its center
    const IntervalEstimate flat = confidence_interval(sums_of({1, 1, 1}), 0.05);
    CHECK(flat.lo == 1.0);
    CHECK(flat.hi == 1.0);
    CHECK_THAT(flat.level, Catch::Matchers::WithinRel(0.95, 1e-15));

    // direct arithmetic: center = (2+4)/2 = 3, halfwidth = q(0.975) sqrt(2)/2
    const IntervalEstimate two = confidence_interval(sums_of({2, 4}), 0.05);
    CHECK_THAT((two.lo + two.hi) / 2.0, Catch::Matchers::WithinRel(3.0, 1e-12));
    CHECK_THAT((two.hi - two.lo) / 2.0,
               Catch::Matchers::WithinAbs(1.3859038243496775, 1e-10));

    // the full budget collapses the quantile to 0
    const IntervalEstimate total = confidence_interval(sums_of({2, 4}), 1.0);
    CHECK(total.lo == total.hi);
    CHECK_THAT(total.lo, Catch::Matchers::WithinRel(3.0, 1e-12));
    CHECK(total.level == 0.0);

    CHECK_THROWS_AS(confidence_interval(sums_of({2, 4}), 0.0), config_error);
    CHECK_THROWS_AS(confidence_interval(sums_of({2, 4}), 1.5), config_error);
    CHECK_THROWS_AS(confidence_interval(sums_of({2, 4}), -0.1), config_error);
    CHECK_THROWS_AS(confidence_interval(sums_of({2}), 0.05), config_error);
}

TEST_CASE("confidence interval respects block scaling") {
    // with m > 1 the center divides by k*m
    std::vector<double> y = {2, 4, 6};
    BlockPlan plan;
    plan.n = 12;
    plan.m = 2;
    plan.k = 3;
    const IntervalEstimate est = confidence_interval(BlockSums{y, plan}, 0.1);
    CHECK_THAT((est.lo + est.hi) / 2.0,
               Catch::Matchers::WithinRel(12.0 / 6.0, 1e-12));
    CHECK(est.hi > est.lo);
}
