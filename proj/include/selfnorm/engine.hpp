#pragma once

// Simulation engine: the deterministic continued-fraction ratio table, Monte
// Carlo tail-ratio sweeps, and moderate-deviation slope experiments.
//
// Determinism contract: work is sharded over grid indices or replicate
// ranges; workers accumulate integer counts only; counts merge by addition
// and every floating-point division happens exactly once, after the merge.
// Hence the output bytes do not depend on the worker count, and Monte Carlo
// output is a pure function of (configuration, seed).

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "selfnorm/blocks.hpp"
#include "selfnorm/bounds.hpp"
#include "selfnorm/contfrac.hpp"
#include "selfnorm/errors.hpp"
#include "selfnorm/normal.hpp"
#include "selfnorm/sources.hpp"
#include "selfnorm/stats.hpp"

namespace selfnorm {

inline constexpr const char* kEngineVersion = "1.0.0";

// ---------------------------------------------------------------------------
// Table structures

struct WilsonInterval {
    double lo = 0.0;
    double hi = 0.0;
};

// 95% score interval for a binomial proportion.
inline WilsonInterval wilson_interval(std::uint64_t count, std::uint64_t total) {
    if (total == 0) throw config_error("wilson_interval: empty sample");
    const double z = 1.959963984540054;
    const double n = static_cast<double>(total);
    const double p = static_cast<double>(count) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half =
        z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {center - half, center + half};
}

// One-sided 95% upper confidence bound on a probability whose sample count
// was zero: the smallest p with (1-p)^total <= 0.05.
inline double zero_count_upper_bound(std::uint64_t total) {
    if (total == 0) throw config_error("zero_count_upper_bound: empty sample");
    return 1.0 - std::pow(0.05, 1.0 / static_cast<double>(total));
}

struct RatioCell {
    double t = 0.0;
    std::uint64_t count = 0;
    std::uint64_t total = 0;
    double empirical = 0.0;
    double survival = 0.0;
    double ratio = 0.0;
    std::optional<WilsonInterval> wilson;
};

struct RatioRow {
    std::string label;
    std::uint64_t m = 0;
    std::uint64_t k = 0;
    std::uint64_t degenerate = 0;
    std::vector<RatioCell> cells;
};

struct RatioTable {
    std::string mode;         // "grid" or "mc"
    std::string source;       // grid description or source label
    std::uint64_t n = 0;
    std::uint64_t total = 0;  // grid size or replicate count
    std::optional<std::uint64_t> seed;
    std::optional<double> mu;
    std::optional<double> exponent;
    std::string center;       // centering rule applied to the statistic
    std::string engine_version = kEngineVersion;
    std::vector<double> thresholds;
    std::vector<RatioRow> rows;
};

namespace detail {

// Shard [0, work) into contiguous ranges, run fn(range begin, range end,
// shard slot), and give each shard its own accumulator slot.  `threads` = 0
// means hardware concurrency.
template <typename Fn>
inline std::size_t run_sharded(std::uint64_t work, unsigned threads, Fn&& fn) {
    unsigned t = threads ? threads : std::thread::hardware_concurrency();
    if (t == 0) t = 1;
    if (static_cast<std::uint64_t>(t) > work)
        t = static_cast<unsigned>(work ? work : 1);
    if (t == 1) {
        fn(std::uint64_t{0}, work, std::size_t{0});
        return 1;
    }
    std::vector<std::thread> pool;
    pool.reserve(t);
    const std::uint64_t chunk = work / t, extra = work % t;
    std::uint64_t begin = 0;
    for (unsigned w = 0; w < t; ++w) {
        const std::uint64_t len = chunk + (w < extra ? 1 : 0);
        const std::uint64_t end = begin + len;
        pool.emplace_back([&fn, begin, end, w] { fn(begin, end, std::size_t{w}); });
        begin = end;
    }
    for (auto& th : pool) th.join();
    return t;
}

// Block sums for one replicate without materializing unread positions: the
// i.i.d. source is a pure function of the stream position, so only the
// in-block positions are evaluated; sequential sources generate exactly the
// prefix the plan reads.
inline std::vector<double> replicate_block_sums(const SourceSpec& source,
                                                const BlockPlan& plan,
                                                std::uint64_t seed,
                                                std::uint64_t replicate) {
    const std::uint64_t m = plan.m, k = plan.k;
    if (source.kind == SourceKind::iid_normal) {
        NormalStream z(seed, replicate);
        std::vector<double> y(k);
        for (std::uint64_t j = 0; j < k; ++j) {
            const std::uint64_t base = 2 * m * j;
            double acc = 0.0;
            for (std::uint64_t i = 0; i < m; ++i)
                acc += z.at(base + i);
            y[j] = acc;
        }
        return y;
    }
    const std::size_t need = static_cast<std::size_t>(2 * m * (k - 1) + m);
    const auto series = source.prefix(need, seed, replicate);
    return interlaced_sums(series, plan).y;
}

inline void finalize_cells(RatioRow& row, const std::vector<double>& t_list,
                           const std::vector<std::uint64_t>& counts,
                           std::uint64_t total, bool with_wilson) {
    row.cells.clear();
    row.cells.reserve(t_list.size());
    for (std::size_t i = 0; i < t_list.size(); ++i) {
        RatioCell c;
        c.t = t_list[i];
        c.count = counts[i];
        c.total = total;
        c.empirical = static_cast<double>(c.count) / static_cast<double>(total);
        c.survival = survival(c.t);
        c.ratio = c.empirical / c.survival;
        if (with_wilson) c.wilson = wilson_interval(c.count, total);
        row.cells.push_back(c);
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Deterministic continued-fraction table

enum class DigitMode { exact, float64 };
enum class BlockLayout { interlaced, consecutive };

struct CfTableConfig {
    std::uint64_t n = 30;
    std::vector<std::uint64_t> m_list = {1, 2, 3, 4};
    std::vector<double> t_list = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6,
                                  0.7, 0.8, 0.9, 1.0, 1.2, 1.4};
    std::uint64_t grid_size = kGridSize;
    std::uint64_t mu_terms = 300;
    double exponent = 1.0 / 3.0;
    unsigned pi_precision = 200;
    DigitMode digit_mode = DigitMode::exact;       // float64 is diagnostic-only
    BlockLayout layout = BlockLayout::interlaced;  // consecutive is diagnostic-only
    unsigned threads = 0;
};

// Tail-frequency table over the deterministic grid x_i = i*pi_hat/10000:
// for each block length m, W is the fixed-center self-normalized statistic
// of the blocked digit powers, and each cell counts {W >= t} over the whole
// grid.  No RNG is involved anywhere.
inline RatioTable run_cf_table(const CfTableConfig& cfg = {}) {
    if (cfg.m_list.empty() || cfg.t_list.empty())
        throw config_error("run_cf_table: empty m or t list");
    if (cfg.grid_size < 1 || cfg.grid_size > kGridSize)
        throw config_error("run_cf_table: grid size must lie in [1, 3182]");

    const double mu = mu_truncated(cfg.mu_terms, cfg.exponent);

    std::vector<BlockPlan> plans;
    for (std::uint64_t m : cfg.m_list) plans.push_back(plan_blocks(cfg.n, m));

    const std::size_t nm = cfg.m_list.size(), nt = cfg.t_list.size();
    struct Shard {
        std::vector<std::vector<std::uint64_t>> counts;
        std::vector<std::uint64_t> degenerate;
    };
    unsigned req = cfg.threads ? cfg.threads : std::thread::hardware_concurrency();
    if (req == 0) req = 1;
    std::vector<Shard> shards(req);
    for (auto& s : shards) {
        s.counts.assign(nm, std::vector<std::uint64_t>(nt, 0));
        s.degenerate.assign(nm, 0);
    }

    detail::run_sharded(cfg.grid_size, req, [&](std::uint64_t b, std::uint64_t e,
                                                std::size_t slot) {
        Shard& sh = shards[slot];
        for (std::uint64_t idx = b; idx < e; ++idx) {
            const std::uint64_t index = idx + 1;  // grid is 1-based
            std::vector<double> series;
            if (cfg.digit_mode == DigitMode::exact)
                series = cf_series(index, static_cast<std::size_t>(cfg.n),
                                   cfg.exponent, cfg.pi_precision);
            else
                series = float_orbit_series(index, static_cast<std::size_t>(cfg.n),
                                            cfg.exponent);
            for (std::size_t r = 0; r < nm; ++r) {
                const BlockPlan& plan = plans[r];
                BlockSums sums =
                    cfg.layout == BlockLayout::interlaced
                        ? interlaced_sums(series, plan)
                        : consecutive_sums(series, plan.m, plan.k);
                double w;
                try {
                    w = self_norm_stat(sums, static_cast<double>(plan.m) * mu);
                } catch (const degenerate_error&) {
                    ++sh.degenerate[r];
                    continue;
                }
                for (std::size_t c = 0; c < nt; ++c)
                    if (w >= cfg.t_list[c]) ++sh.counts[r][c];
            }
        }
    });

    RatioTable table;
    table.mode = "grid";
    table.source = (cfg.digit_mode == DigitMode::exact ? "cf-grid-exact-pi"
                                                       : "cf-grid-float64") +
                   std::string(cfg.layout == BlockLayout::interlaced
                                   ? ""
                                   : "-consecutive");
    table.n = cfg.n;
    table.total = cfg.grid_size;
    table.mu = mu;
    table.exponent = cfg.exponent;
    table.center = "fixed-mu";
    table.thresholds = cfg.t_list;
    for (std::size_t r = 0; r < nm; ++r) {
        RatioRow row;
        row.m = plans[r].m;
        row.k = plans[r].k;
        row.label = "m=" + std::to_string(row.m);
        std::vector<std::uint64_t> counts(nt, 0);
        for (const auto& sh : shards) {
            for (std::size_t c = 0; c < nt; ++c) counts[c] += sh.counts[r][c];
            row.degenerate += sh.degenerate[r];
        }
        detail::finalize_cells(row, cfg.t_list, counts, cfg.grid_size, false);
        table.rows.push_back(std::move(row));
    }
    return table;
}

// ---------------------------------------------------------------------------
// Monte Carlo tail-ratio sweep

enum class CenterMode { known_mean, sample_mean };

struct McConfig {
    SourceSpec source;
    std::uint64_t n = 20000;
    std::optional<double> alpha = 0.3;      // block exponent, or
    std::optional<std::uint64_t> m;         // explicit block length
    std::vector<double> t_list = {0.5, 1.0, 1.5};
    std::uint64_t replicates = 100000;
    std::uint64_t seed = 1;
    CenterMode center = CenterMode::known_mean;
    double known_mean_value = 0.0;          // per-observation mean under known_mean
    unsigned threads = 0;
};

inline RatioTable run_mc(const McConfig& cfg) {
    if (cfg.replicates < 1000)
        throw config_error("run_mc: need >= 1000 replicates");
    if (cfg.t_list.empty()) throw config_error("run_mc: empty t list");
    const BlockPlan plan = cfg.m ? plan_blocks(cfg.n, *cfg.m)
                                 : plan_blocks_alpha(cfg.n, cfg.alpha.value_or(0.3));

    const std::size_t nt = cfg.t_list.size();
    struct Shard {
        std::vector<std::uint64_t> counts;
        std::uint64_t degenerate = 0;
    };
    unsigned req = cfg.threads ? cfg.threads : std::thread::hardware_concurrency();
    if (req == 0) req = 1;
    std::vector<Shard> shards(req);
    for (auto& s : shards) s.counts.assign(nt, 0);

    detail::run_sharded(cfg.replicates, req, [&](std::uint64_t b, std::uint64_t e,
                                                 std::size_t slot) {
        Shard& sh = shards[slot];
        for (std::uint64_t r = b; r < e; ++r) {
            const auto y =
                detail::replicate_block_sums(cfg.source, plan, cfg.seed, r);
            BlockSums sums{y, plan};
            double w;
            try {
                const double block_mean =
                    static_cast<double>(plan.m) * cfg.known_mean_value;
                if (cfg.center == CenterMode::known_mean)
                    w = self_norm_stat(sums, block_mean);
                else
                    w = student_stat(sums, block_mean);
            } catch (const degenerate_error&) {
                ++sh.degenerate;
                continue;
            }
            for (std::size_t c = 0; c < nt; ++c)
                if (w >= cfg.t_list[c]) ++sh.counts[c];
        }
    });

    RatioTable table;
    table.mode = "mc";
    table.source = cfg.source.label();
    table.n = cfg.n;
    table.total = cfg.replicates;
    table.seed = cfg.seed;
    table.center =
        cfg.center == CenterMode::known_mean ? "fixed-mu" : "sample-mean";
    table.thresholds = cfg.t_list;

    RatioRow row;
    row.m = plan.m;
    row.k = plan.k;
    row.label = "m=" + std::to_string(plan.m);
    std::vector<std::uint64_t> counts(nt, 0);
    for (const auto& sh : shards) {
        for (std::size_t c = 0; c < nt; ++c) counts[c] += sh.counts[c];
        row.degenerate += sh.degenerate;
    }
    detail::finalize_cells(row, cfg.t_list, counts, cfg.replicates, true);
    table.rows.push_back(std::move(row));
    return table;
}

// ---------------------------------------------------------------------------
// Moderate-deviation slope sweep

struct MdpConfig {
    SourceSpec source;
    std::vector<std::uint64_t> n_list = {1000, 10000, 100000};
    double a_exponent = 0.1;   // a_n = n^a_exponent
    double alpha = 0.3;        // block exponent
    IntervalSet event;         // B: event is {W/a_n in B}
    std::string event_text;    // source text of B, echoed into reports
    std::uint64_t replicates = 100000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

struct MdpCell {
    std::uint64_t n = 0;
    double a = 0.0;
    std::uint64_t count = 0;
    std::uint64_t replicates = 0;
    double empirical = 0.0;          // count / replicates
    double slope = 0.0;              // (1/a^2) ln empirical; -inf when count=0
    std::optional<double> cp_upper;  // set when count = 0
    std::uint64_t degenerate = 0;
};

struct MdpReport {
    std::string source;
    std::string event_text;
    double a_exponent = 0.0;
    double alpha = 0.0;
    std::uint64_t seed = 0;
    std::string engine_version = kEngineVersion;
    double interior_inf = 0.0;   // inf over the interior of x^2/2
    double closure_inf = 0.0;    // inf over the closure of x^2/2
    bool empty_interior = false;
    std::vector<MdpCell> cells;
    bool trend_toward_target = false;  // |slope + closure_inf| shrinks end-to-end
};

inline bool interval_set_contains(const IntervalSet& set, double x) {
    for (const auto& iv : set) {
        const bool lo_ok = x > iv.lo || (iv.lo_closed && x == iv.lo);
        const bool hi_ok = x < iv.hi || (iv.hi_closed && x == iv.hi);
        if (lo_ok && hi_ok) return true;
    }
    return false;
}

inline MdpReport run_mdp_sweep(const MdpConfig& cfg) {
    if (cfg.n_list.empty()) throw config_error("run_mdp_sweep: empty n list");
    if (cfg.event.empty()) throw config_error("run_mdp_sweep: empty event set");
    if (cfg.replicates < 1000)
        throw config_error("run_mdp_sweep: need >= 1000 replicates");
    if (!(cfg.a_exponent > 0.0))
        throw config_error("run_mdp_sweep: a exponent must be > 0");
    // The speed window: a_n grows without bound but stays below the block
    // CLT scale n^{(1-alpha)/2}; checked numerically along the supplied list.
    for (std::size_t i = 0; i + 1 < cfg.n_list.size(); ++i) {
        if (cfg.n_list[i + 1] <= cfg.n_list[i])
            throw config_error("run_mdp_sweep: n list must increase");
    }
    if (!(cfg.a_exponent < (1.0 - cfg.alpha) / 2.0))
        throw config_error(
            "run_mdp_sweep: a exponent must stay below (1-alpha)/2");

    MdpReport rep;
    rep.source = cfg.source.label();
    rep.event_text = cfg.event_text;
    rep.a_exponent = cfg.a_exponent;
    rep.alpha = cfg.alpha;
    rep.seed = cfg.seed;
    rep.interior_inf = mdp_rate_interval(cfg.event, SetVariant::interior);
    rep.closure_inf = mdp_rate_interval(cfg.event, SetVariant::closure);
    rep.empty_interior = std::isinf(rep.interior_inf);

    for (std::uint64_t n : cfg.n_list) {
        const BlockPlan plan = plan_blocks_alpha(n, cfg.alpha);
        const double a = std::pow(static_cast<double>(n), cfg.a_exponent);

        struct Shard {
            std::uint64_t count = 0;
            std::uint64_t degenerate = 0;
        };
        unsigned req =
            cfg.threads ? cfg.threads : std::thread::hardware_concurrency();
        if (req == 0) req = 1;
        std::vector<Shard> shards(req);
        detail::run_sharded(cfg.replicates, req,
                            [&](std::uint64_t b, std::uint64_t e, std::size_t slot) {
            Shard& sh = shards[slot];
            for (std::uint64_t r = b; r < e; ++r) {
                const auto y = detail::replicate_block_sums(cfg.source, plan,
                                                            cfg.seed, r);
                BlockSums sums{y, plan};
                double w;
                try {
                    w = self_norm_stat(sums, 0.0);
                } catch (const degenerate_error&) {
                    ++sh.degenerate;
                    continue;
                }
                if (interval_set_contains(cfg.event, w / a)) ++sh.count;
            }
        });

        MdpCell cell;
        cell.n = n;
        cell.a = a;
        cell.replicates = cfg.replicates;
        for (const auto& sh : shards) {
            cell.count += sh.count;
            cell.degenerate += sh.degenerate;
        }
        cell.empirical = static_cast<double>(cell.count) /
                         static_cast<double>(cfg.replicates);
        if (cell.count == 0) {
            cell.slope = -std::numeric_limits<double>::infinity();
            cell.cp_upper = zero_count_upper_bound(cfg.replicates);
        } else {
            cell.slope = std::log(cell.empirical) / (a * a);
        }
        rep.cells.push_back(cell);
    }

    if (rep.cells.size() >= 2) {
        const double target = -rep.closure_inf;
        const double first = std::abs(rep.cells.front().slope - target);
        const double last = std::abs(rep.cells.back().slope - target);
        rep.trend_toward_target = last < first;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Byte-stable writers

namespace detail {

inline std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

inline std::string fmt(std::uint64_t v) { return std::to_string(v); }

} // namespace detail

// One CSV row per (m, t) cell; '.' decimal, ',' separator, LF endings,
// header always present.  Floats use shortest round-trip formatting.
inline std::string table_csv(const RatioTable& table) {
    std::string out = "m,k,t,count,total,empirical,survival,ratio,degenerate\n";
    for (const auto& row : table.rows)
        for (const auto& c : row.cells) {
            out += detail::fmt(row.m);
            out += ',';
            out += detail::fmt(row.k);
            out += ',';
            out += detail::fmt(c.t);
            out += ',';
            out += detail::fmt(c.count);
            out += ',';
            out += detail::fmt(c.total);
            out += ',';
            out += detail::fmt(c.empirical);
            out += ',';
            out += detail::fmt(c.survival);
            out += ',';
            out += detail::fmt(c.ratio);
            out += ',';
            out += detail::fmt(row.degenerate);
            out += '\n';
        }
    return out;
}

inline nlohmann::ordered_json table_json(const RatioTable& table) {
    nlohmann::ordered_json j;
    j["engine_version"] = table.engine_version;
    j["mode"] = table.mode;
    j["source"] = table.source;
    j["n"] = table.n;
    j["total"] = table.total;
    if (table.seed) j["seed"] = *table.seed;
    if (table.mu) j["mu"] = *table.mu;
    if (table.exponent) j["exponent"] = *table.exponent;
    j["center"] = table.center;
    j["thresholds"] = table.thresholds;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json rj;
        rj["label"] = row.label;
        rj["m"] = row.m;
        rj["k"] = row.k;
        rj["degenerate"] = row.degenerate;
        rj["cells"] = nlohmann::ordered_json::array();
        for (const auto& c : row.cells) {
            nlohmann::ordered_json cj;
            cj["t"] = c.t;
            cj["count"] = c.count;
            cj["total"] = c.total;
            cj["empirical"] = c.empirical;
            cj["survival"] = c.survival;
            cj["ratio"] = c.ratio;
            if (c.wilson) {
                cj["wilson_lo"] = c.wilson->lo;
                cj["wilson_hi"] = c.wilson->hi;
            }
            rj["cells"].push_back(std::move(cj));
        }
        j["rows"].push_back(std::move(rj));
    }
    return j;
}

// MDP report CSV: one row per n.
inline std::string mdp_csv(const MdpReport& rep) {
    std::string out =
        "n,a,count,replicates,empirical,slope,cp_upper,target_interior,"
        "target_closure,degenerate\n";
    for (const auto& c : rep.cells) {
        out += detail::fmt(c.n);
        out += ',';
        out += detail::fmt(c.a);
        out += ',';
        out += detail::fmt(c.count);
        out += ',';
        out += detail::fmt(c.replicates);
        out += ',';
        out += detail::fmt(c.empirical);
        out += ',';
        out += detail::fmt(c.slope);
        out += ',';
        out += c.cp_upper ? detail::fmt(*c.cp_upper) : std::string();
        out += ',';
        out += detail::fmt(-rep.interior_inf);
        out += ',';
        out += detail::fmt(-rep.closure_inf);
        out += ',';
        out += detail::fmt(c.degenerate);
        out += '\n';
    }
    return out;
}

inline nlohmann::ordered_json mdp_json(const MdpReport& rep) {
    nlohmann::ordered_json j;
    j["engine_version"] = rep.engine_version;
    j["mode"] = "mdp";
    j["source"] = rep.source;
    j["event"] = rep.event_text;
    j["a_exponent"] = rep.a_exponent;
    j["alpha"] = rep.alpha;
    j["seed"] = rep.seed;
    j["target_interior"] =
        rep.empty_interior ? nlohmann::ordered_json("-inf")
                           : nlohmann::ordered_json(-rep.interior_inf);
    j["target_closure"] = -rep.closure_inf;
    j["empty_interior"] = rep.empty_interior;
    j["trend_toward_target"] = rep.trend_toward_target;
    j["cells"] = nlohmann::ordered_json::array();
    for (const auto& c : rep.cells) {
        nlohmann::ordered_json cj;
        cj["n"] = c.n;
        cj["a"] = c.a;
        cj["count"] = c.count;
        cj["replicates"] = c.replicates;
        cj["empirical"] = c.empirical;
        if (std::isinf(c.slope))
            cj["slope"] = "-inf";
        else
            cj["slope"] = c.slope;
        if (c.cp_upper) cj["cp_upper"] = *c.cp_upper;
        cj["degenerate"] = c.degenerate;
        j["cells"].push_back(std::move(cj));
    }
    return j;
}

} // namespace selfnorm
