#pragma once

// Finite-state Markov chains as exactly analyzable weakly-dependent sources:
// stationary law by direct linear solve, the uniform-mixing coefficient
//   psi(n) = max_{x,y} | P^n(x,y) / pi(y) - 1 |
// from exact matrix powers, stationary simulation on the counter RNG, and an
// exhaustively-enumerated covariance inequality check.
//
// For a stationary chain, conditioning a lag-n future event on the past acts
// through the n-step transition kernel, and the worst relative perturbation
// over cylinder events is attained on single states; docs/mixing-notes.md
// walks through the reduction.  Chains whose one-step matrix is strictly
// positive are flagged "certified": for them psi(n) decays geometrically.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <queue>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "selfnorm/errors.hpp"
#include "selfnorm/rng.hpp"

namespace selfnorm {

using Matrix = std::vector<std::vector<double>>;

namespace detail {

inline Matrix mat_mul(const Matrix& a, const Matrix& b) {
    const std::size_t s = a.size();
    Matrix out(s, std::vector<double>(s, 0.0));
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t l = 0; l < s; ++l) {
            const double ail = a[i][l];
            if (ail == 0.0) continue;
            for (std::size_t j = 0; j < s; ++j) out[i][j] += ail * b[l][j];
        }
    return out;
}

inline Matrix mat_pow(Matrix base, std::uint64_t e) {
    const std::size_t s = base.size();
    Matrix result(s, std::vector<double>(s, 0.0));
    for (std::size_t i = 0; i < s; ++i) result[i][i] = 1.0;
    while (e > 0) {
        if (e & 1) result = mat_mul(result, base);
        base = mat_mul(base, base);
        e >>= 1;
    }
    return result;
}

// Strong connectivity of the positive-entry digraph via forward and backward
// reachability from state 0.
inline bool irreducible(const Matrix& P) {
    const std::size_t s = P.size();
    auto reach = [&](bool forward) {
        std::vector<char> seen(s, 0);
        std::queue<std::size_t> q;
        q.push(0);
        seen[0] = 1;
        while (!q.empty()) {
            const std::size_t x = q.front();
            q.pop();
            for (std::size_t y = 0; y < s; ++y) {
                const double w = forward ? P[x][y] : P[y][x];
                if (w > 0.0 && !seen[y]) {
                    seen[y] = 1;
                    q.push(y);
                }
            }
        }
        for (char c : seen)
            if (!c) return false;
        return true;
    };
    return reach(true) && reach(false);
}

} // namespace detail

// Left eigenvector of P for eigenvalue 1, normalized to a probability
// vector.  Solved as the linear system pi (P - I) = 0 with the normalization
// sum(pi) = 1 replacing one redundant equation; Gaussian elimination with
// partial pivoting is plenty for <= 64 states.
inline std::vector<double> stationary_dist(const Matrix& P) {
    const std::size_t s = P.size();
    if (s < 2) throw config_error("stationary_dist: need at least 2 states");
    for (const auto& row : P) {
        if (row.size() != s)
            throw config_error("stationary_dist: matrix must be square");
        double sum = 0.0;
        for (double v : row) {
            if (v < 0.0)
                throw config_error("stationary_dist: negative entry");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw config_error("stationary_dist: row sums must be 1");
    }
    if (!detail::irreducible(P))
        throw data_error("stationary_dist: chain is reducible");

    // Build A^T x = b for A = (P^T - I) with last row replaced by ones.
    std::vector<std::vector<double>> a(s, std::vector<double>(s + 1, 0.0));
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t j = 0; j < s; ++j) a[i][j] = P[j][i];
        a[i][i] -= 1.0;
    }
    for (std::size_t j = 0; j < s; ++j) a[s - 1][j] = 1.0;
    a[s - 1][s] = 1.0;

    for (std::size_t col = 0; col < s; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < s; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        if (std::abs(a[col][col]) < 1e-14)
            throw data_error("stationary_dist: singular balance system");
        for (std::size_t r = 0; r < s; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t c2 = col; c2 <= s; ++c2) a[r][c2] -= f * a[col][c2];
        }
    }
    std::vector<double> pi(s);
    double total = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
        pi[i] = a[i][s] / a[i][i];
        if (pi[i] < 0.0 && pi[i] > -1e-13) pi[i] = 0.0;
        total += pi[i];
    }
    for (double& v : pi) v /= total;

    // residual check: pi P = pi
    for (std::size_t j = 0; j < s; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < s; ++i) acc += pi[i] * P[i][j];
        if (std::abs(acc - pi[j]) > 1e-10)
            throw data_error("stationary_dist: residual exceeds 1e-10");
    }
    return pi;
}

struct FiniteMarkovChain {
    std::string name;
    Matrix P;               // row-stochastic transitions
    std::vector<double> pi; // stationary law
    std::vector<double> f;  // state-to-value map, centered under pi
    bool certified = false; // all transition entries strictly positive

    std::size_t states() const { return P.size(); }
};

// Build a chain from transitions and a raw value map.  The value map is
// re-centered so that sum_i pi(i) f(i) = 0 exactly as represented.
inline FiniteMarkovChain make_chain(Matrix P, std::vector<double> f,
                                    std::string name = "chain") {
    FiniteMarkovChain c;
    c.P = std::move(P);
    const std::size_t s = c.P.size();
    if (s < 2 || s > 64)
        throw config_error("make_chain: state count must lie in [2, 64]");
    if (f.size() != s)
        throw config_error("make_chain: value map length must equal states");
    c.pi = stationary_dist(c.P);
    double mean = 0.0;
    for (std::size_t i = 0; i < s; ++i) mean += c.pi[i] * f[i];
    for (double& v : f) v -= mean;
    c.f = std::move(f);
    c.name = std::move(name);
    c.certified = true;
    for (const auto& row : c.P)
        for (double v : row)
            if (!(v > 0.0)) c.certified = false;
    return c;
}

// JSON chain files: {"name": str, "states": int, "P": row-major flat or
// nested array, "f": array}.
inline FiniteMarkovChain load_chain(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("load_chain: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw data_error("load_chain: bad JSON in " + path + ": " + e.what());
    }
    try {
        const auto s = j.at("states").get<std::size_t>();
        Matrix P;
        const auto& pj = j.at("P");
        if (!pj.is_array() || pj.empty())
            throw data_error("load_chain: P must be a nonempty array");
        if (pj.front().is_array()) {
            P = pj.get<Matrix>();
        } else {
            const auto flat = pj.get<std::vector<double>>();
            if (flat.size() != s * s)
                throw data_error("load_chain: flat P must have states^2 entries");
            P.assign(s, std::vector<double>(s));
            for (std::size_t i = 0; i < s; ++i)
                for (std::size_t c2 = 0; c2 < s; ++c2) P[i][c2] = flat[i * s + c2];
        }
        if (P.size() != s)
            throw data_error("load_chain: P row count != states");
        auto f = j.at("f").get<std::vector<double>>();
        std::string name = j.value("name", std::string("chain"));
        return make_chain(std::move(P), std::move(f), std::move(name));
    } catch (const nlohmann::json::exception& e) {
        throw data_error("load_chain: schema error in " + path + ": " +
                         e.what());
    }
}

// psi(n) = max_{x,y} |P^n(x,y)/pi(y) - 1|.  When every row of P equals pi
// (an i.i.d. chain), P^n == P for every n >= 1 as an algebraic identity, so
// the coefficient is returned as an exact 0 rather than a rounding residue.
inline double psi_coefficient(const FiniteMarkovChain& chain,
                              std::uint64_t n) {
    if (n < 1) throw config_error("psi_coefficient: n must be positive");
    const std::size_t s = chain.states();
    bool iid = true;
    for (std::size_t x = 1; x < s && iid; ++x)
        for (std::size_t y = 0; y < s; ++y)
            if (chain.P[x][y] != chain.P[0][y]) {
                iid = false;
                break;
            }
    if (iid) return 0.0;

    const Matrix Pn = detail::mat_pow(chain.P, n);
    double worst = 0.0;
    for (std::size_t x = 0; x < s; ++x)
        for (std::size_t y = 0; y < s; ++y) {
            if (!(chain.pi[y] > 0.0))
                throw config_error("psi_coefficient: stationary mass zero");
            const double dev = std::abs(Pn[x][y] / chain.pi[y] - 1.0);
            if (dev > worst) worst = dev;
        }
    return worst;
}

// Tabulate psi over a gap range.
inline std::vector<double> psi_profile(const FiniteMarkovChain& chain,
                                       std::uint64_t max_gap) {
    std::vector<double> out;
    out.reserve(max_gap);
    for (std::uint64_t g = 1; g <= max_gap; ++g)
        out.push_back(psi_coefficient(chain, g));
    return out;
}

// Stationary path simulation: initial state from pi, then row-wise inverse
// CDF steps, one uniform per step.  (seed, stream, chain, length) fixes the
// output bitwise.
inline std::vector<double> simulate_chain(const FiniteMarkovChain& chain,
                                          std::size_t length,
                                          std::uint64_t seed,
                                          std::uint64_t stream = 0) {
    if (length < 1) throw config_error("simulate_chain: length must be >= 1");
    UniformStream u(seed, stream);
    const std::size_t s = chain.states();

    auto pick = [s](const std::vector<double>& dist, double r) {
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < s; ++i) {
            acc += dist[i];
            if (r < acc) return i;
        }
        return s - 1;
    };

    std::vector<double> out(length);
    std::size_t state = pick(chain.pi, u.at(0));
    out[0] = chain.f[state];
    for (std::size_t t = 1; t < length; ++t) {
        state = pick(chain.P[state], u.at(t));
        out[t] = chain.f[state];
    }
    return out;
}

struct CovarianceCheck {
    double lhs = 0.0;  // |E XY - EX EY|
    double rhs = 0.0;  // psi(gap) E|X| E|Y|
    bool holds = false;
};

// Exact enumeration of the covariance inequality for Y = g(state at time 1),
// X = h(state at time 1+gap) under the stationary law: the joint mass of
// (state_1 = x, state_{1+gap} = y) is pi(x) P^gap(x,y).  No sampling.
inline CovarianceCheck doukhan_gap_check(const FiniteMarkovChain& chain,
                                         const std::vector<double>& g,
                                         const std::vector<double>& h,
                                         std::uint64_t gap) {
    if (gap < 1) throw config_error("doukhan_gap_check: gap must be >= 1");
    const std::size_t s = chain.states();
    if (g.size() != s || h.size() != s)
        throw config_error("doukhan_gap_check: functional size mismatch");

    const Matrix Pg = detail::mat_pow(chain.P, gap);
    double exy = 0.0, ey = 0.0, ex = 0.0, ay = 0.0, ax = 0.0;
    for (std::size_t x = 0; x < s; ++x) {
        ey += chain.pi[x] * g[x];
        ax += chain.pi[x] * std::abs(h[x]);
        ay += chain.pi[x] * std::abs(g[x]);
        ex += chain.pi[x] * h[x];
        for (std::size_t y = 0; y < s; ++y)
            exy += chain.pi[x] * Pg[x][y] * g[x] * h[y];
    }
    CovarianceCheck r;
    r.lhs = std::abs(exy - ex * ey);
    r.rhs = psi_coefficient(chain, gap) * ax * ay;
    r.holds = r.lhs <= r.rhs + 1e-12;
    return r;
}

} // namespace selfnorm
