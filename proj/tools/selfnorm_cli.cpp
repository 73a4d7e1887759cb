// Command-line front end for the self-normalized block-statistics library:
// deterministic ratio tables, Monte Carlo sweeps, moderate-deviation slopes,
// mixing coefficients, continued-fraction dumps, confidence intervals, and
// bound evaluation.
//
// Exit codes: 0 success, 1 validation/config error, 2 runtime/numeric error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "selfnorm/engine.hpp"

namespace {

using namespace selfnorm;

unsigned resolve_threads(unsigned cli_value) {
    if (cli_value != 0) return cli_value;
    if (const char* env = std::getenv("SELFNORM_THREADS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end && *end == '\0' && v > 0 && v <= 1024)
            return static_cast<unsigned>(v);
        throw config_error("SELFNORM_THREADS must be an integer in [1, 1024]");
    }
    return 0;  // engine resolves to hardware concurrency
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw data_error("cannot open output file " + out_path);
    out << text;
    if (!out) throw data_error("failed writing output file " + out_path);
}

// Shared source selection for the stochastic subcommands.
struct SourceCli {
    std::string kind = "iid-normal";
    std::string chain_path;
    std::vector<double> ma_theta;

    void attach(CLI::App* cmd) {
        cmd->add_option("--source", kind,
                        "data source: iid-normal or ma (with --ma-theta)")
            ->capture_default_str();
        cmd->add_option("--chain", chain_path,
                        "JSON chain file; overrides --source");
        cmd->add_option("--ma-theta", ma_theta,
                        "moving-average weights theta_0..theta_q");
    }

    SourceSpec build() const {
        if (!chain_path.empty())
            return SourceSpec::markov(load_chain(chain_path));
        if (kind == "iid-normal") return SourceSpec::iid();
        if (kind == "ma") {
            if (ma_theta.empty())
                throw config_error("source 'ma' requires --ma-theta");
            return SourceSpec::moving_average(ma_theta);
        }
        throw config_error("unknown source '" + kind + "'");
    }
};

std::string render_table(const RatioTable& table, const std::string& format) {
    if (format == "csv") return table_csv(table);
    if (format == "json") return table_json(table).dump(2) + "\n";
    throw config_error("unknown format '" + format + "'");
}

std::vector<double> read_value_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open data file " + path);
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // tolerate surrounding whitespace and blank lines
        std::size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        std::size_t e = line.find_last_not_of(" \t\r");
        const std::string tok = line.substr(b, e - b + 1);
        try {
            std::size_t used = 0;
            values.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw data_error(path + ":" + std::to_string(lineno) +
                             ": not a number: '" + tok + "'");
        }
    }
    if (values.empty()) throw data_error(path + ": no values");
    return values;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"self-normalized block statistics for weakly dependent series"};
    app.set_version_flag("--version", std::string(selfnorm::kEngineVersion));
    app.require_subcommand(1);

    std::string out_path;
    app.add_option("--out", out_path, "write results to PATH instead of stdout")
        ->configurable(false);

    // ---- table ------------------------------------------------------------
    CfTableConfig table_cfg;
    std::string table_format = "csv";
    std::string digit_mode = "exact";
    std::string layout = "interlaced";
    unsigned table_threads = 0;
    auto* cmd_table = app.add_subcommand(
        "table", "deterministic continued-fraction ratio table");
    cmd_table->fallthrough();
    cmd_table->add_option("--n", table_cfg.n, "series length per grid point")
        ->capture_default_str();
    cmd_table->add_option("--m", table_cfg.m_list, "block lengths")
        ->capture_default_str();
    cmd_table->add_option("--t", table_cfg.t_list, "thresholds");
    cmd_table->add_option("--grid-size", table_cfg.grid_size,
                          "number of grid points (<= 3182)")
        ->capture_default_str();
    cmd_table->add_option("--mu-terms", table_cfg.mu_terms,
                          "terms in the truncated mean")
        ->capture_default_str();
    cmd_table->add_option("--exponent", table_cfg.exponent,
                          "digit power exponent")
        ->capture_default_str();
    cmd_table->add_option("--pi-precision", table_cfg.pi_precision,
                          "embedded pi precision: 200 or 300 digits")
        ->capture_default_str();
    cmd_table
        ->add_option("--digit-mode", digit_mode,
                     "exact (big-rational) or float64 (diagnostic orbit)")
        ->capture_default_str();
    cmd_table
        ->add_option("--layout", layout,
                     "interlaced (gap blocks) or consecutive (diagnostic)")
        ->capture_default_str();
    cmd_table->add_option("--threads", table_threads, "worker count");
    cmd_table->add_option("--format", table_format, "csv or json")
        ->capture_default_str();

    // ---- mc ---------------------------------------------------------------
    McConfig mc_cfg;
    SourceCli mc_source;
    std::string mc_format = "csv";
    std::string mc_center = "fixed";
    double mc_alpha = 0.3;
    std::uint64_t mc_m = 0;
    unsigned mc_threads = 0;
    auto* cmd_mc =
        app.add_subcommand("mc", "Monte Carlo tail-ratio table for a source");
    cmd_mc->fallthrough();
    mc_source.attach(cmd_mc);
    cmd_mc->add_option("--n", mc_cfg.n, "series length")->capture_default_str();
    cmd_mc->add_option("--alpha", mc_alpha, "block exponent (m = floor(n^alpha))")
        ->capture_default_str();
    cmd_mc->add_option("--m", mc_m, "explicit block length (overrides --alpha)");
    cmd_mc->add_option("--t", mc_cfg.t_list, "thresholds");
    cmd_mc->add_option("--replicates", mc_cfg.replicates, "replicate count")
        ->capture_default_str();
    cmd_mc->add_option("--seed", mc_cfg.seed, "RNG seed")->capture_default_str();
    cmd_mc
        ->add_option("--center", mc_center,
                     "fixed (known mean) or sample (studentized)")
        ->capture_default_str();
    cmd_mc->add_option("--mean", mc_cfg.known_mean_value,
                       "per-observation mean under fixed centering")
        ->capture_default_str();
    cmd_mc->add_option("--threads", mc_threads, "worker count");
    cmd_mc->add_option("--format", mc_format, "csv or json")
        ->capture_default_str();

    // ---- mdp --------------------------------------------------------------
    MdpConfig mdp_cfg;
    SourceCli mdp_source;
    std::string mdp_format = "csv";
    std::string mdp_set = "[1,inf)";
    unsigned mdp_threads = 0;
    auto* cmd_mdp = app.add_subcommand(
        "mdp", "moderate-deviation slope sweep over growing n");
    cmd_mdp->fallthrough();
    mdp_source.attach(cmd_mdp);
    cmd_mdp->add_option("--n", mdp_cfg.n_list, "increasing series lengths")
        ->capture_default_str();
    cmd_mdp->add_option("--a-exp", mdp_cfg.a_exponent,
                        "speed exponent: a_n = n^a_exp")
        ->capture_default_str();
    cmd_mdp->add_option("--alpha", mdp_cfg.alpha, "block exponent")
        ->capture_default_str();
    cmd_mdp->add_option("--set", mdp_set,
                        "event set, e.g. \"[1,inf)\" or \"(-inf,-1]u[2,inf)\"")
        ->capture_default_str();
    cmd_mdp->add_option("--replicates", mdp_cfg.replicates, "replicate count")
        ->capture_default_str();
    cmd_mdp->add_option("--seed", mdp_cfg.seed, "RNG seed")
        ->capture_default_str();
    cmd_mdp->add_option("--threads", mdp_threads, "worker count");
    cmd_mdp->add_option("--format", mdp_format, "csv or json")
        ->capture_default_str();

    // ---- psi --------------------------------------------------------------
    std::string psi_chain_path;
    std::uint64_t psi_max_gap = 5;
    std::string psi_format = "csv";
    auto* cmd_psi = app.add_subcommand(
        "psi", "uniform-mixing coefficients of a chain over a gap range");
    cmd_psi->fallthrough();
    cmd_psi->add_option("--chain", psi_chain_path, "JSON chain file")
        ->required();
    cmd_psi->add_option("--max-gap", psi_max_gap, "largest gap")
        ->capture_default_str();
    cmd_psi->add_option("--format", psi_format, "csv or json")
        ->capture_default_str();

    // ---- cf ---------------------------------------------------------------
    std::uint64_t cf_index = 1;
    std::uint64_t cf_depth = 30;
    double cf_exponent = 1.0 / 3.0;
    unsigned cf_precision = 200;
    std::string cf_format = "csv";
    auto* cmd_cf = app.add_subcommand(
        "cf", "continued-fraction digits and digit powers for a grid point");
    cmd_cf->fallthrough();
    cmd_cf->add_option("--index", cf_index, "grid index in [1, 3182]")
        ->capture_default_str();
    cmd_cf->add_option("--depth", cf_depth, "number of digits")
        ->capture_default_str();
    cmd_cf->add_option("--exponent", cf_exponent, "digit power exponent")
        ->capture_default_str();
    cmd_cf->add_option("--pi-precision", cf_precision, "200 or 300")
        ->capture_default_str();
    cmd_cf->add_option("--format", cf_format, "csv or json")
        ->capture_default_str();

    // ---- ci ---------------------------------------------------------------
    std::string ci_in;
    std::uint64_t ci_m = 1;
    double ci_delta = 0.05;
    std::string ci_format = "csv";
    auto* cmd_ci = app.add_subcommand(
        "ci", "self-normalized confidence interval from a value-per-line file");
    cmd_ci->fallthrough();
    cmd_ci->add_option("--in", ci_in, "data file, one value per line")
        ->required();
    cmd_ci->add_option("--m", ci_m, "block length")->capture_default_str();
    cmd_ci->add_option("--delta", ci_delta, "miscoverage budget in (0, 1]")
        ->capture_default_str();
    cmd_ci->add_option("--format", ci_format, "csv or json")
        ->capture_default_str();

    // ---- bound ------------------------------------------------------------
    bool bound_fan = false;
    double bound_x = 1.0, bound_v = 1.0, bound_beta = 2.0;
    std::uint64_t bound_n = 10000;
    double bound_alpha = 0.3, bound_rho = 1.0, bound_c = 1.0, bound_psi = 0.0;
    auto* cmd_bound_cli = app.add_subcommand(
        "bound", "evaluate the deviation-error envelope or the tail inequality");
    cmd_bound_cli->fallthrough();
    cmd_bound_cli->add_flag("--fan", bound_fan,
                            "evaluate the exponential tail inequality instead");
    cmd_bound_cli->add_option("--x", bound_x, "argument x")
        ->capture_default_str();
    cmd_bound_cli->add_option("--v", bound_v, "variance proxy (fan mode)")
        ->capture_default_str();
    cmd_bound_cli->add_option("--beta", bound_beta, "shape in (1, 2] (fan mode)")
        ->capture_default_str();
    cmd_bound_cli->add_option("--n", bound_n, "series length")
        ->capture_default_str();
    cmd_bound_cli->add_option("--alpha", bound_alpha, "block exponent")
        ->capture_default_str();
    cmd_bound_cli->add_option("--rho", bound_rho, "moment-decay parameter")
        ->capture_default_str();
    cmd_bound_cli->add_option("--c", bound_c, "leading constant")
        ->capture_default_str();
    cmd_bound_cli->add_option("--psi", bound_psi,
                              "mixing coefficient at the plan's block length")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (cmd_table->parsed()) {
            if (digit_mode == "exact")
                table_cfg.digit_mode = DigitMode::exact;
            else if (digit_mode == "float64")
                table_cfg.digit_mode = DigitMode::float64;
            else
                throw config_error("unknown digit mode '" + digit_mode + "'");
            if (layout == "interlaced")
                table_cfg.layout = BlockLayout::interlaced;
            else if (layout == "consecutive")
                table_cfg.layout = BlockLayout::consecutive;
            else
                throw config_error("unknown layout '" + layout + "'");
            table_cfg.threads = resolve_threads(table_threads);
            emit(render_table(run_cf_table(table_cfg), table_format), out_path);
        } else if (cmd_mc->parsed()) {
            mc_cfg.source = mc_source.build();
            if (mc_m > 0) {
                mc_cfg.m = mc_m;
                mc_cfg.alpha.reset();
            } else {
                mc_cfg.alpha = mc_alpha;
                mc_cfg.m.reset();
            }
            if (mc_center == "fixed")
                mc_cfg.center = CenterMode::known_mean;
            else if (mc_center == "sample")
                mc_cfg.center = CenterMode::sample_mean;
            else
                throw config_error("unknown center mode '" + mc_center + "'");
            mc_cfg.threads = resolve_threads(mc_threads);
            emit(render_table(run_mc(mc_cfg), mc_format), out_path);
        } else if (cmd_mdp->parsed()) {
            mdp_cfg.source = mdp_source.build();
            mdp_cfg.event = parse_interval_set(mdp_set);
            mdp_cfg.event_text = mdp_set;
            mdp_cfg.threads = resolve_threads(mdp_threads);
            const MdpReport rep = run_mdp_sweep(mdp_cfg);
            if (mdp_format == "csv")
                emit(mdp_csv(rep), out_path);
            else if (mdp_format == "json")
                emit(mdp_json(rep).dump(2) + "\n", out_path);
            else
                throw config_error("unknown format '" + mdp_format + "'");
        } else if (cmd_psi->parsed()) {
            const FiniteMarkovChain chain = load_chain(psi_chain_path);
            if (psi_max_gap < 1)
                throw config_error("psi: --max-gap must be >= 1");
            const auto values = psi_profile(chain, psi_max_gap);
            if (psi_format == "csv") {
                std::string text = "gap,psi\n";
                for (std::size_t g = 0; g < values.size(); ++g) {
                    text += std::to_string(g + 1);
                    text += ',';
                    text += selfnorm::detail::fmt(values[g]);
                    text += '\n';
                }
                emit(text, out_path);
            } else if (psi_format == "json") {
                nlohmann::ordered_json j;
                j["chain"] = chain.name;
                j["certified"] = chain.certified;
                j["psi"] = nlohmann::ordered_json::array();
                for (std::size_t g = 0; g < values.size(); ++g) {
                    nlohmann::ordered_json e;
                    e["gap"] = g + 1;
                    e["value"] = values[g];
                    j["psi"].push_back(std::move(e));
                }
                emit(j.dump(2) + "\n", out_path);
            } else {
                throw config_error("unknown format '" + psi_format + "'");
            }
        } else if (cmd_cf->parsed()) {
            const auto x = pi_grid_point(cf_index, cf_precision);
            const auto digits =
                cf_digits(x, static_cast<std::size_t>(cf_depth));
            if (cf_format == "csv") {
                std::string text = "i,digit,power\n";
                for (std::size_t i = 0; i < digits.digits.size(); ++i) {
                    text += std::to_string(i + 1);
                    text += ',';
                    text += std::to_string(digits.digits[i]);
                    text += ',';
                    text += selfnorm::detail::fmt(
                        std::pow(static_cast<double>(digits.digits[i]),
                                 cf_exponent));
                    text += '\n';
                }
                emit(text, out_path);
            } else if (cf_format == "json") {
                nlohmann::ordered_json j;
                j["index"] = cf_index;
                j["pi_precision"] = cf_precision;
                j["terminated"] = digits.terminated;
                j["digits"] = digits.digits;
                std::vector<double> powers;
                powers.reserve(digits.digits.size());
                for (auto d : digits.digits)
                    powers.push_back(
                        std::pow(static_cast<double>(d), cf_exponent));
                j["powers"] = powers;
                emit(j.dump(2) + "\n", out_path);
            } else {
                throw config_error("unknown format '" + cf_format + "'");
            }
        } else if (cmd_ci->parsed()) {
            const auto values = read_value_file(ci_in);
            const BlockPlan plan = plan_blocks(values.size(), ci_m);
            const BlockSums sums = interlaced_sums(values, plan);
            const IntervalEstimate est = confidence_interval(sums, ci_delta);
            if (ci_format == "csv") {
                std::string text = "m,k,lo,hi,level\n";
                text += std::to_string(plan.m);
                text += ',';
                text += std::to_string(plan.k);
                text += ',';
                text += selfnorm::detail::fmt(est.lo);
                text += ',';
                text += selfnorm::detail::fmt(est.hi);
                text += ',';
                text += selfnorm::detail::fmt(est.level);
                text += '\n';
                emit(text, out_path);
            } else if (ci_format == "json") {
                nlohmann::ordered_json j;
                j["m"] = plan.m;
                j["k"] = plan.k;
                j["lo"] = est.lo;
                j["hi"] = est.hi;
                j["level"] = est.level;
                emit(j.dump(2) + "\n", out_path);
            } else {
                throw config_error("unknown format '" + ci_format + "'");
            }
        } else if (cmd_bound_cli->parsed()) {
            char buf[64];
            if (bound_fan) {
                const double v = fan_exp_bound(bound_x, bound_v, bound_beta);
                std::snprintf(buf, sizeof buf, "%.6f\n", v);
                emit(buf, out_path);
            } else {
                BoundConfig cfg;
                cfg.n = bound_n;
                cfg.alpha = bound_alpha;
                cfg.rho = bound_rho;
                cfg.c = bound_c;
                if (bound_psi > 0.0) {
                    MixingProfile p;
                    p.psi[plan_blocks_alpha(bound_n, bound_alpha).m] = bound_psi;
                    cfg.profile = p;
                } else {
                    cfg.profile = MixingProfile::zero();
                }
                const BoundValue bv = selfnorm::cmd_bound(bound_x, cfg);
                if (!bv.in_range)
                    std::fprintf(stderr,
                                 "note: x is at or beyond the validity range "
                                 "n^((1-alpha)/2)\n");
                std::snprintf(buf, sizeof buf, "%.6f\n", bv.value);
                emit(buf, out_path);
            }
        }
        return 0;
    } catch (const config_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const data_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const selfnorm::error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
