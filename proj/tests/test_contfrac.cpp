// Tests for the continued-fraction module: exact digit expansions, the
// Gauss-map identity, the invariant digit law, the truncated digit-power
// mean, the pi/10000 grid, and the float64 diagnostic orbit.

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdint>
#include <vector>

#include "selfnorm/contfrac.hpp"
#include "selfnorm/errors.hpp"

using namespace selfnorm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinULP;

namespace {

using DigitVec = std::vector<std::int64_t>;

// First 30 digits of grid points 1, 2, and 3182, computed once and frozen.
const DigitVec kIdx1{3183, 10, 8, 1, 2, 5, 2, 1, 1, 2, 4, 1, 3, 2, 2,
                     6,    4,  1, 2, 1, 1, 4, 1, 1, 1, 7, 6, 1, 4, 3};
const DigitVec kIdx2{1591, 1, 1, 4, 1,  1, 3, 1, 5, 2, 1, 2, 3, 1, 9,
                     1,    1, 4, 1, 12, 2, 2, 1, 3, 1, 1, 1, 4, 1, 3};
const DigitVec kIdx3182{1, 2895, 1, 2, 1, 1, 1, 1, 1, 1, 7, 1, 32, 3, 1,
                        1, 2,    6, 7, 6, 4, 1, 1, 1, 6, 1, 1, 2,  5, 8};

constexpr std::size_t kDepth = 30;

// Depth-30 expansions of the full grid at precision 200, computed once.
const std::vector<DigitVec>& grid_digits() {
    static const std::vector<DigitVec> all = [] {
        std::vector<DigitVec> v(static_cast<std::size_t>(kGridSize) + 1);
        for (std::int64_t i = 1; i <= kGridSize; ++i)
            v[static_cast<std::size_t>(i)] =
                cf_digits(pi_grid_point(i, 200), kDepth).digits;
        return v;
    }();
    return all;
}

// Splitmix-style generator for reproducible random rationals.
std::uint64_t mix(std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace

TEST_CASE("digit expansions of small rationals match hand values") {
    const auto a = cf_digits(BigRational(1, 3), 10);
    CHECK(a.digits == DigitVec{3});
    CHECK(a.terminated);

    const auto b = cf_digits(BigRational(2, 5), 10);
    CHECK(b.digits == DigitVec{2, 2});
    CHECK(b.terminated);

    const auto c = cf_digits(BigRational(3141, 10000), 10);
    CHECK(c.digits == DigitVec{3, 5, 2, 3, 1, 15, 4});
    CHECK(c.terminated);

    // Truncation below the natural length leaves terminated == false.
    const auto trunc = cf_digits(BigRational(3141, 10000), 3);
    CHECK(trunc.digits == DigitVec{3, 5, 2});
    CHECK_FALSE(trunc.terminated);
}

TEST_CASE("digit expansion rejects arguments outside (0,1)") {
    CHECK_THROWS_AS(cf_digits(BigRational(0), 5), config_error);
    CHECK_THROWS_AS(cf_digits(BigRational(1), 5), config_error);
    CHECK_THROWS_AS(cf_digits(BigRational(7, 5), 5), config_error);
    CHECK_THROWS_AS(cf_digits(BigRational(-1, 3), 5), config_error);
}

TEST_CASE("Euclidean digits equal Gauss-map digits and fold back exactly") {
    std::uint64_t state = 20260822;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::int64_t q =
            2 + static_cast<std::int64_t>(mix(state) % 999999ull);
        const std::int64_t p =
            1 + static_cast<std::int64_t>(mix(state) % (q - 1));
        const BigRational x(p, q);

        const auto euclid = cf_digits(x, 200);
        REQUIRE(euclid.terminated);

        DigitVec via_gauss;
        BigRational y = x;
        while (y != 0 && via_gauss.size() < 200)
            via_gauss.push_back(gauss_step(y));
        CHECK(via_gauss == euclid.digits);

        CHECK(cf_fold(euclid.digits) == x);
    }
}

TEST_CASE("folding rejects empty or non-positive digit sequences") {
    CHECK_THROWS_AS(cf_fold({}), config_error);
    CHECK_THROWS_AS(cf_fold({3, 0, 2}), config_error);
    CHECK_THROWS_AS(cf_fold({3, -1}), config_error);
    CHECK(cf_fold({1, 2}) == BigRational(2, 3));
}

TEST_CASE("grid-point expansions match frozen digit vectors") {
    CHECK(grid_digits()[1] == kIdx1);
    CHECK(grid_digits()[2] == kIdx2);
    CHECK(grid_digits()[3182] == kIdx3182);
}

TEST_CASE("digit-law masses: values, monotonicity, telescoped partial sums") {
    CHECK_THAT(gauss_mass(1), WithinULP(0.4150374992788438, 1));
    CHECK_THROWS_AS(gauss_mass(0), config_error);
    CHECK_THROWS_AS(gauss_mass(-2), config_error);

    for (std::int64_t j = 1; j < 50; ++j)
        CHECK(gauss_mass(j) > gauss_mass(j + 1));

    for (std::int64_t J : {std::int64_t{1}, std::int64_t{10}, std::int64_t{100},
                           std::int64_t{10000}}) {
        const double closed =
            std::log2(2.0 * static_cast<double>(J + 1) /
                      static_cast<double>(J + 2));
        CHECK_THAT(gauss_partial_sum(J), WithinAbs(closed, 1e-12));
    }
    // Masses sum toward 1 from below.
    const double s = gauss_partial_sum(10000);
    CHECK(s > 0.9997);
    CHECK(s < 1.0);
    CHECK_THROWS_AS(gauss_partial_sum(0), config_error);
}

TEST_CASE("truncated digit-power mean") {
    CHECK(mu_truncated(300, 1.0 / 3.0) == 1.4875932360708415);
    // Terms are positive, so the truncated mean increases with the cutoff;
    // terms decay only like j^(-5/3), so the 200->300 increment is ~0.015.
    CHECK(mu_truncated(200, 1.0 / 3.0) < mu_truncated(300, 1.0 / 3.0));
    CHECK(mu_truncated(300, 1.0 / 3.0) - mu_truncated(200, 1.0 / 3.0) < 0.02);
    CHECK_THROWS_AS(mu_truncated(0, 1.0 / 3.0), config_error);
    CHECK_THROWS_AS(mu_truncated(300, 0.0), config_error);
    CHECK_THROWS_AS(mu_truncated(300, 1.0), config_error);
    CHECK_THROWS_AS(mu_truncated(300, -0.5), config_error);
}

TEST_CASE("pi grid points: bounds, ordering, precision variants") {
    CHECK_THROWS_AS(pi_grid_point(0), config_error);
    CHECK_THROWS_AS(pi_grid_point(3183), config_error);
    CHECK_THROWS_AS(pi_rational(100), config_error);

    CHECK(pi_grid_point(1) > 0);
    CHECK(pi_grid_point(3182) < 1);
    CHECK(pi_grid_point(1) < pi_grid_point(2));
    CHECK(pi_grid_point(3181) < pi_grid_point(3182));

    // The two stored precisions agree to well beyond double precision.
    const BigRational d = pi_rational(300) - pi_rational(200);
    CHECK(static_cast<double>(d) < 1e-190);
    CHECK(static_cast<double>(d) >= 0.0);
}

TEST_CASE("series of digit powers for grid points") {
    const auto z = cf_series(1, 5, 1.0 / 3.0);
    REQUIRE(z.size() == 5);
    CHECK(z[0] == 14.709984424285784); // 3183^(1/3)
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(z[i] ==
              std::pow(static_cast<double>(kIdx1[i]), 1.0 / 3.0));
}

TEST_CASE("finite expansions stop exactly where the rational runs out") {
    // Grid point 1 at precision 200 has exactly 381 digits.
    const auto full = cf_digits(pi_grid_point(1, 200), 5000);
    CHECK(full.digits.size() == 381);
    CHECK(full.terminated);
    CHECK(cf_fold(full.digits) == pi_grid_point(1, 200));

    CHECK_NOTHROW(cf_series(1, 381, 1.0 / 3.0));
    CHECK_THROWS_AS(cf_series(1, 382, 1.0 / 3.0), precision_error);
    CHECK_THROWS_AS(cf_series(1, 1000, 1.0 / 3.0), precision_error);
    CHECK_THROWS_AS(cf_series(0, 30, 1.0 / 3.0), config_error);
    CHECK_THROWS_AS(cf_series(3183, 30, 1.0 / 3.0), config_error);
}

TEST_CASE("precision 200 and 300 give identical depth-30 digits grid-wide") {
    for (std::int64_t i = 1; i <= kGridSize; ++i) {
        const auto d300 = cf_digits(pi_grid_point(i, 300), kDepth).digits;
        REQUIRE(d300 == grid_digits()[static_cast<std::size_t>(i)]);
    }
    // And the derived series agree bitwise.
    CHECK(cf_series(1, kDepth, 1.0 / 3.0, 200) ==
          cf_series(1, kDepth, 1.0 / 3.0, 300));
}

TEST_CASE("digit frequencies across the grid follow the invariant law") {
    const auto& all = grid_digits();
    const double total = static_cast<double>(kGridSize);

    // Position 1 reflects the (roughly uniform) grid itself, not the
    // invariant law: digit 1 there means x > 1/2, which holds for half the
    // grid points.  The invariant-law mass of digit 1 is 0.415, so this
    // position is genuinely different.
    std::int64_t first_ones = 0;
    for (std::int64_t i = 1; i <= kGridSize; ++i)
        if (all[static_cast<std::size_t>(i)][0] == 1) ++first_ones;
    CHECK_THAT(static_cast<double>(first_ones) / total, WithinAbs(0.5, 0.02));

    // From position 2 on, each position's digit-1 frequency sits near the
    // invariant mass (observed worst deviation 0.027 at position 2).
    for (std::size_t p = 1; p < kDepth; ++p) {
        std::int64_t ones = 0;
        for (std::int64_t i = 1; i <= kGridSize; ++i)
            if (all[static_cast<std::size_t>(i)][p] == 1) ++ones;
        CHECK_THAT(static_cast<double>(ones) / total,
                   WithinAbs(gauss_mass(1), 0.04));
    }

    // Pooled over positions 2..30 the law is tight for small digit values.
    const double pooled_total = total * static_cast<double>(kDepth - 1);
    for (std::int64_t v = 1; v <= 5; ++v) {
        std::int64_t c = 0;
        for (std::int64_t i = 1; i <= kGridSize; ++i)
            for (std::size_t p = 1; p < kDepth; ++p)
                if (all[static_cast<std::size_t>(i)][p] == v) ++c;
        CHECK_THAT(static_cast<double>(c) / pooled_total,
                   WithinAbs(gauss_mass(v), 0.02));
    }

    // Pooling all 30 positions only dilutes the position-1 discrepancy.
    const double all_total = total * static_cast<double>(kDepth);
    for (std::int64_t v = 1; v <= 5; ++v) {
        std::int64_t c = 0;
        for (std::int64_t i = 1; i <= kGridSize; ++i)
            for (std::size_t p = 0; p < kDepth; ++p)
                if (all[static_cast<std::size_t>(i)][p] == v) ++c;
        CHECK_THAT(static_cast<double>(c) / all_total,
                   WithinAbs(gauss_mass(v), 0.02));
    }
}

TEST_CASE("float64 orbit matches shallow digits and drifts off deep ones") {
    CHECK_THROWS_AS(float_orbit_digits(0.0, 5), config_error);
    CHECK_THROWS_AS(float_orbit_digits(1.0, 5), config_error);
    CHECK_THROWS_AS(float_orbit_series(0, 5, 1.0), config_error);

    const double x0 = 1.0 * 3.141592653589793 / 10000.0;
    const auto fd = float_orbit_digits(x0, kDepth);
    REQUIRE(fd.size() == kDepth);
    // Shallow digits agree with the exact expansion (observed: first 14).
    for (std::size_t i = 0; i < 8; ++i) CHECK(fd[i] == kIdx1[i]);
    // Deep digits do not: compounding roundoff has decorrelated the orbit.
    CHECK(fd != kIdx1);

    const auto fs = float_orbit_series(1, 10, 0.5);
    const auto fdig = float_orbit_digits(x0, 10);
    for (std::size_t i = 0; i < 10; ++i)
        CHECK(fs[i] == std::pow(static_cast<double>(fdig[i]), 0.5));
}
