#pragma once

// Synthetic weakly-dependent series: i.i.d. standard normals, stationary
// finite Markov chains, and q-dependent moving averages.  Every source is
// driven by the counter RNG, so (seed, replicate) pins each sample path
// bitwise, and generating a prefix of a path never depends on how much of
// it will be read.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selfnorm/bounds.hpp"
#include "selfnorm/errors.hpp"
#include "selfnorm/kahan.hpp"
#include "selfnorm/markov.hpp"
#include "selfnorm/rng.hpp"

namespace selfnorm {

enum class SourceKind { iid_normal, markov_chain, moving_average };

struct SourceSpec {
    SourceKind kind = SourceKind::iid_normal;
    std::optional<FiniteMarkovChain> chain;
    std::vector<double> ma_theta;  // innovation weights theta_0..theta_q

    static SourceSpec iid() { return SourceSpec{}; }

    static SourceSpec markov(FiniteMarkovChain c) {
        SourceSpec s;
        s.kind = SourceKind::markov_chain;
        s.chain = std::move(c);
        return s;
    }

    // X_t = sum_j theta_j Z_{t-j} over a two-sided innovation stream,
    // rescaled to unit variance; values q apart share no innovation, so the
    // mixing coefficient vanishes beyond that range.
    static SourceSpec moving_average(std::vector<double> theta) {
        if (theta.size() < 2)
            throw config_error("moving_average: need at least two weights");
        double norm2 = 0.0;
        for (double v : theta) norm2 += v * v;
        if (!(norm2 > 0.0))
            throw config_error("moving_average: weights must not all vanish");
        const double scale = 1.0 / std::sqrt(norm2);
        for (double& v : theta) v *= scale;
        SourceSpec s;
        s.kind = SourceKind::moving_average;
        s.ma_theta = std::move(theta);
        return s;
    }

    std::string label() const {
        switch (kind) {
            case SourceKind::iid_normal: return "iid-normal";
            case SourceKind::markov_chain:
                return "markov:" + (chain ? chain->name : std::string("?"));
            case SourceKind::moving_average:
                return "ma(" + std::to_string(ma_theta.size() - 1) + ")";
        }
        return "?";
    }

    // First `len` values of replicate `replicate` under `seed`.
    std::vector<double> prefix(std::size_t len, std::uint64_t seed,
                               std::uint64_t replicate) const {
        if (len < 1) throw config_error("source prefix: length must be >= 1");
        switch (kind) {
            case SourceKind::iid_normal: {
                NormalStream z(seed, replicate);
                std::vector<double> out(len);
                for (std::size_t i = 0; i < len; ++i) out[i] = z.at(i);
                return out;
            }
            case SourceKind::markov_chain:
                return simulate_chain(*chain, len, seed, replicate);
            case SourceKind::moving_average: {
                const std::size_t q = ma_theta.size() - 1;
                NormalStream z(seed, replicate);
                std::vector<double> out(len);
                // X_t reads innovations at positions t .. t+q with weight
                // theta_j on position t+q-j, keeping prefixes stable.
                for (std::size_t t = 0; t < len; ++t) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j <= q; ++j)
                        acc += ma_theta[j] * z.at(t + q - j);
                    out[t] = acc;
                }
                return out;
            }
        }
        throw config_error("source prefix: unknown kind");
    }

    // Mixing coefficients for gaps 1..max_gap where the model makes them
    // exactly computable; gaps the model does not determine are left
    // untabulated rather than guessed.
    MixingProfile mixing_profile(std::uint64_t max_gap) const {
        switch (kind) {
            case SourceKind::iid_normal:
                return MixingProfile::zero();
            case SourceKind::markov_chain:
                return MixingProfile::from_values(psi_profile(*chain, max_gap),
                                                 true);
            case SourceKind::moving_average: {
                MixingProfile p;
                p.certified = true;
                const std::uint64_t q = ma_theta.size() - 1;
                for (std::uint64_t g = q + 1; g <= max_gap; ++g) p.psi[g] = 0.0;
                return p;
            }
        }
        return MixingProfile::zero();
    }
};

// Empirical block-moment normalizations: for S = X_1 + ... + X_m, the
// estimates of E[S^2]/m and E|S|^{2+rho}/m^{1+rho/2} across an m-grid, with
// Monte Carlo standard errors.  A well-behaved source keeps the first
// bounded away from 0 (lower envelope c1^2) and the second bounded above
// (upper envelope c2^{2+rho}).
struct MomentCell {
    std::uint64_t m = 0;
    double second_norm = 0.0;   // mean of S^2/m
    double second_se = 0.0;
    double higher_norm = 0.0;   // mean of |S|^{2+rho}/m^{1+rho/2}
    double higher_se = 0.0;
};

struct MomentReport {
    double rho = 0.0;
    std::uint64_t replicates = 0;
    std::vector<MomentCell> cells;
    double c1_sq_hat = 0.0;     // min second_norm over the grid
    double c2_pow_hat = 0.0;    // max higher_norm over the grid
};

inline MomentReport moment_diagnostics(const SourceSpec& source,
                                       const std::vector<std::uint64_t>& m_grid,
                                       double rho, std::uint64_t replicates,
                                       std::uint64_t seed) {
    if (m_grid.empty())
        throw config_error("moment_diagnostics: empty m grid");
    if (!(rho > 0.0 && rho <= 1.0))
        throw config_error("moment_diagnostics: rho must lie in (0, 1]");
    if (replicates < 100)
        throw config_error("moment_diagnostics: need >= 100 replicates");

    MomentReport rep;
    rep.rho = rho;
    rep.replicates = replicates;
    for (std::uint64_t m : m_grid) {
        if (m < 1) throw config_error("moment_diagnostics: m must be >= 1");
        KahanSum s2, s2sq, sh, shsq;
        for (std::uint64_t r = 0; r < replicates; ++r) {
            const auto x = source.prefix(m, seed, r);
            double s = 0.0;
            for (double v : x) s += v;
            const double a = s * s / static_cast<double>(m);
            const double b = std::pow(std::abs(s), 2.0 + rho) /
                             std::pow(static_cast<double>(m), 1.0 + rho / 2.0);
            s2.add(a);
            s2sq.add(a * a);
            sh.add(b);
            shsq.add(b * b);
        }
        const double nr = static_cast<double>(replicates);
        MomentCell cell;
        cell.m = m;
        cell.second_norm = s2.value() / nr;
        cell.higher_norm = sh.value() / nr;
        const double var2 =
            std::max(0.0, s2sq.value() / nr - cell.second_norm * cell.second_norm);
        const double varh =
            std::max(0.0, shsq.value() / nr - cell.higher_norm * cell.higher_norm);
        cell.second_se = std::sqrt(var2 / nr);
        cell.higher_se = std::sqrt(varh / nr);
        rep.cells.push_back(cell);
    }
    rep.c1_sq_hat = rep.cells.front().second_norm;
    rep.c2_pow_hat = rep.cells.front().higher_norm;
    for (const auto& c : rep.cells) {
        rep.c1_sq_hat = std::min(rep.c1_sq_hat, c.second_norm);
        rep.c2_pow_hat = std::max(rep.c2_pow_hat, c.higher_norm);
    }
    return rep;
}

} // namespace selfnorm
