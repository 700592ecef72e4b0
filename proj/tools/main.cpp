// ambilab command-line front end: solve and sweep the ambiguity game,
// generate synthetic survey panels, ingest expert files, fit panel
// specifications, and run the end-to-end replication recipes.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ambilab/dgp.hpp"
#include "ambilab/game.hpp"
#include "ambilab/ingest.hpp"
#include "ambilab/panel.hpp"
#include "ambilab/recipes.hpp"
#include "ambilab/regress.hpp"
#include "ambilab/sweep.hpp"

namespace fs = std::filesystem;
using namespace ambilab;

namespace {

std::string timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", std::localtime(&t));
    return buf;
}

// Run directories live under --out if given, else $AMBILAB_OUTPUT_ROOT,
// else ./runs.
std::string resolve_out_dir(const std::string& out_flag, const std::string& subcommand) {
    if (!out_flag.empty()) return out_flag;
    std::string root = "runs";
    if (const char* env = std::getenv("AMBILAB_OUTPUT_ROOT"); env && *env) root = env;
    return (fs::path(root) / (subcommand + "-" + timestamp())).string();
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void print_report(const game::EquilibriumReport& report) {
    std::cout << "k = " << report.k << ", l = " << report.l << "\n";
    std::cout << "thresholds: k^2 - 3/2 = " << report.centrist_threshold
              << ", k^2 + l^2 - 5/2 = " << report.extremist_threshold << "\n";
    std::cout << "regime: " << to_string(report.regime) << "\n";
    std::cout << "win probabilities (centrist, extremist):\n";
    for (const auto& profile : game::all_profiles()) {
        const auto& [pc, pe] = report.payoffs.at(profile);
        std::cout << "  " << profile.label() << ": (" << pc << ", " << pe << ")\n";
    }
    std::cout << "pure equilibria:";
    for (const auto& profile : report.pure_equilibria) std::cout << ' ' << profile.label();
    std::cout << "\n";
}

struct CommonOpts {
    std::string out;
    std::uint64_t seed = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--out", opts.out, "Output directory (default: under the output root)");
    cmd->add_option("--seed", opts.seed, "Random seed");
}

// Applies "--config <file>" semantics: key=value lines (with # comments)
// become "--key value" arguments, but only for keys not already given on the
// command line, so explicit flags always win.
void merge_config_file(std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return;

    std::ifstream is(path);
    if (!is) throw DomainError("cannot open config file '" + path + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw DomainError("config line " + std::to_string(line_no) +
                              " is not key=value: '" + line + "'");
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = "--" + trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        bool given = false;
        for (const std::string& arg : args) {
            if (arg == key || arg.rfind(key + "=", 0) == 0) {
                given = true;
                break;
            }
        }
        if (!given) {
            // Single-token form so boolean flags work too.
            args.push_back(key + "=" + value);
        }
    }
}

// Echoes every option's resolved value (given or default) for the manifest.
std::map<std::string, std::string> base_manifest(const CLI::App* cmd) {
    std::map<std::string, std::string> entries;
    for (const CLI::Option* opt : cmd->get_options()) {
        if (opt->get_name().rfind("--", 0) != 0) continue;
        const std::string value =
            opt->results().empty() ? opt->get_default_str() : opt->results().front();
        if (!value.empty()) entries["config." + opt->get_name().substr(2)] = value;
    }
    return entries;
}

int run_replicate_baseline(const CLI::App* cmd, const CommonOpts& common,
                           const recipes::BaselineConfig& config) {
    const std::string dir = resolve_out_dir(common.out, "replicate-baseline");
    recipes::BaselineResult result = recipes::replicate_baseline(config);
    auto manifest = base_manifest(cmd);
    manifest["seed"] = std::to_string(config.seed);
    recipes::write_manifest(dir, manifest);
    const int errors = recipes::write_outcomes(dir, result.outcomes);
    for (const auto& [dim, points] : result.binned) {
        recipes::write_binned_csv((fs::path(dir) / ("binned_" + dim + ".csv")).string(), points);
    }
    if (!result.partial_correlations.empty()) {
        std::ofstream os(fs::path(dir) / "partial_correlations.csv");
        os << "pair,partial_correlation\n";
        for (const auto& [pair, value] : result.partial_correlations) {
            os << pair << ',' << value << '\n';
        }
    }
    std::cout << "wrote " << result.outcomes.size() << " spec reports to " << dir << "\n";
    if (errors > 0) {
        std::cerr << errors << " spec(s) failed; see error_index.txt\n";
        return 1;
    }
    return 0;
}

int run_replicate_mechanism(const CLI::App* cmd, const CommonOpts& common,
                            const recipes::MechanismConfig& config) {
    const std::string dir = resolve_out_dir(common.out, "replicate-mechanism");
    recipes::MechanismResult result = recipes::replicate_mechanism(config);
    auto manifest = base_manifest(cmd);
    manifest["seed"] = std::to_string(config.seed);
    recipes::write_manifest(dir, manifest);
    const int errors = recipes::write_outcomes(dir, result.outcomes);
    std::cout << "wrote " << result.outcomes.size() << " spec reports to " << dir << "\n";
    if (errors > 0) {
        std::cerr << errors << " spec(s) failed; see error_index.txt\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ambilab: ambiguity-game solver and panel-econometrics laboratory"};
    app.require_subcommand(1);

    // ---- solve ----
    auto* solve = app.add_subcommand("solve", "Solve the canonical game for one (k, l)");
    std::string solve_k = "1.2", solve_l = "2";
    std::string solve_eps = "0";
    solve->add_option("--k", solve_k, "Commit-set extremity k (rational, 1 < k)")->capture_default_str();
    solve->add_option("--l", solve_l, "Ambiguous-set extremity l (rational, k < l)")->capture_default_str();
    solve->add_option("--boundary-eps", solve_eps, "Regime boundary band around k^2 = 3/2")
        ->capture_default_str();

    // ---- sweep ----
    auto* sweep_cmd = app.add_subcommand("sweep", "Phase sweep over a (k, l) grid");
    CommonOpts sweep_common;
    std::string sweep_kmin = "1.05", sweep_kmax = "1.5", sweep_kstep = "0.05";
    std::string sweep_loffset = "1", sweep_lvalues, sweep_eps = "0";
    sweep_cmd->add_option("--k-min", sweep_kmin, "First k")->capture_default_str();
    sweep_cmd->add_option("--k-max", sweep_kmax, "Last k")->capture_default_str();
    sweep_cmd->add_option("--k-step", sweep_kstep, "k increment")->capture_default_str();
    sweep_cmd->add_option("--l-offset", sweep_loffset, "Offset rule l = k + delta")
        ->capture_default_str();
    sweep_cmd->add_option("--l-values", sweep_lvalues,
                          "Explicit comma-separated l list (overrides --l-offset)");
    sweep_cmd->add_option("--boundary-eps", sweep_eps, "Regime boundary band")->capture_default_str();
    add_common(sweep_cmd, sweep_common);

    // ---- mc-check ----
    auto* mc = app.add_subcommand("mc-check", "Monte Carlo check of one contest");
    CommonOpts mc_common;
    std::string mc_k = "1.2", mc_l = "2", mc_profile = "AC";
    std::uint64_t mc_n = 1000000;
    mc->add_option("--k", mc_k, "k")->capture_default_str();
    mc->add_option("--l", mc_l, "l")->capture_default_str();
    mc->add_option("--profile", mc_profile, "Profile: AA, AC, CA, or CC")->capture_default_str();
    mc->add_option("--n", mc_n, "Number of samples")->capture_default_str();
    add_common(mc, mc_common);

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "Generate a synthetic expert survey");
    CommonOpts gen_common;
    int gen_countries = 25, gen_waves = 2, gen_parties = 8, gen_experts = 30;
    double gen_expert_sd = 1.0;
    std::string gen_model = "quadratic";
    double gen_theta_econ = 0.0, gen_theta_social = 0.0;
    bool gen_context = false;
    gen->add_option("--countries", gen_countries)->capture_default_str();
    gen->add_option("--waves", gen_waves)->capture_default_str();
    gen->add_option("--parties", gen_parties, "Parties per country")->capture_default_str();
    gen->add_option("--experts", gen_experts, "Experts per party")->capture_default_str();
    gen->add_option("--expert-sd", gen_expert_sd, "Expert noise SD")->capture_default_str();
    gen->add_option("--model", gen_model, "Blurriness truth: quadratic or centrism")
        ->capture_default_str();
    gen->add_flag("--context", gen_context, "Also generate economic context columns");
    gen->add_option("--theta-economic", gen_theta_econ, "Triple-interaction truth (economic)")
        ->capture_default_str();
    gen->add_option("--theta-social", gen_theta_social, "Triple-interaction truth (social)")
        ->capture_default_str();
    add_common(gen, gen_common);

    // ---- ingest ----
    auto* ingest_cmd = app.add_subcommand("ingest", "Read an expert file and aggregate");
    CommonOpts ingest_common;
    std::string ingest_input, ingest_schema;
    int ingest_min_experts = 0;
    std::string ingest_dims, ingest_years;
    ingest_cmd->add_option("--input", ingest_input, "Expert-level CSV")->required();
    ingest_cmd->add_option("--schema", ingest_schema,
                           "Schema map field=column pairs, comma separated");
    ingest_cmd->add_option("--min-experts", ingest_min_experts,
                           "Drop groups with fewer experts")->capture_default_str();
    ingest_cmd->add_option("--dimensions", ingest_dims, "Keep only these dimensions");
    ingest_cmd->add_option("--years", ingest_years, "Keep only these waves");
    add_common(ingest_cmd, ingest_common);

    // ---- fit ----
    auto* fit_cmd = app.add_subcommand("fit", "Fit one specification on a panel file");
    CommonOpts fit_common;
    std::string fit_panel, fit_outcome, fit_regressors, fit_fe = "country_year";
    std::string fit_cluster = "party", fit_instruments, fit_label = "fit";
    fit_cmd->add_option("--panel", fit_panel, "Panel CSV")->required();
    fit_cmd->add_option("--outcome", fit_outcome, "Outcome column")->required();
    fit_cmd->add_option("--regressors", fit_regressors,
                        "Comma-separated terms, e.g. pos,pos^2,a*b")->required();
    fit_cmd->add_option("--fe", fit_fe, "Fixed effects: country_year,party or none")
        ->capture_default_str();
    fit_cmd->add_option("--cluster", fit_cluster, "Cluster dimension")->capture_default_str();
    fit_cmd->add_option("--instruments", fit_instruments,
                        "IV map term=col[+col2], semicolon separated");
    fit_cmd->add_option("--label", fit_label, "Report label")->capture_default_str();
    add_common(fit_cmd, fit_common);

    // ---- replicate-baseline ----
    auto* baseline = app.add_subcommand("replicate-baseline",
                                        "Baseline battery on synthetic or supplied data");
    CommonOpts baseline_common;
    recipes::BaselineConfig baseline_config;
    std::string baseline_model = "quadratic";
    baseline->add_option("--panel", baseline_config.panel_csv, "Aggregated panel CSV");
    baseline->add_option("--expert", baseline_config.expert_csv, "Expert-level CSV to aggregate");
    baseline->add_option("--countries", baseline_config.panel_spec.n_countries)->capture_default_str();
    baseline->add_option("--waves", baseline_config.panel_spec.n_waves)->capture_default_str();
    baseline->add_option("--parties", baseline_config.panel_spec.parties_per_country)
        ->capture_default_str();
    baseline->add_option("--experts", baseline_config.experts_per_party)->capture_default_str();
    baseline->add_option("--expert-sd", baseline_config.expert_sd)->capture_default_str();
    baseline->add_option("--model", baseline_model, "quadratic or centrism")->capture_default_str();
    baseline->add_option("--bin-width", baseline_config.bin_width)->capture_default_str();
    add_common(baseline, baseline_common);

    // ---- replicate-mechanism ----
    auto* mechanism = app.add_subcommand("replicate-mechanism",
                                         "Context-interaction battery on synthetic data");
    CommonOpts mech_common;
    recipes::MechanismConfig mech_config = recipes::default_mechanism_config();
    mechanism->add_option("--countries", mech_config.panel_spec.n_countries)->capture_default_str();
    mechanism->add_option("--waves", mech_config.panel_spec.n_waves)->capture_default_str();
    mechanism->add_option("--parties", mech_config.panel_spec.parties_per_country)
        ->capture_default_str();
    mechanism->add_option("--theta-economic", mech_config.context.theta_economic)
        ->capture_default_str();
    mechanism->add_option("--theta-social", mech_config.context.theta_social)
        ->capture_default_str();
    add_common(mechanism, mech_common);

    // Every subcommand accepts a key=value config file; flags override it.
    std::string config_path;
    for (CLI::App* sub : {solve, sweep_cmd, mc, gen, ingest_cmd, fit_cmd, baseline, mechanism}) {
        sub->add_option("--config", config_path,
                        "Read options from a key=value file (flags override)");
    }

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        merge_config_file(args);
        std::reverse(args.begin(), args.end()); // CLI11 expects a reversed vector
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (solve->parsed()) {
            const auto report = game::solve_canonical(Rational::parse(solve_k),
                                                      Rational::parse(solve_l),
                                                      Rational::parse(solve_eps));
            print_report(report);
            const auto g = game::canonical_game(Rational::parse(solve_k), Rational::parse(solve_l));
            std::cout << "lottery EU centrist: "
                      << game::lottery_expected_utility(g.ambiguous_set_c(), g.utility())
                      << ", extremist: "
                      << game::lottery_expected_utility(g.ambiguous_set_e(), g.utility()) << "\n";
            if (!g.centrist_less_ambiguous()) {
                std::cout << "note: centrist ambiguous set is not smaller than extremist's\n";
            }
            return 0;
        }

        if (sweep_cmd->parsed()) {
            game::SweepGrid grid;
            grid.k_values = game::k_range(Rational::parse(sweep_kmin), Rational::parse(sweep_kmax),
                                          Rational::parse(sweep_kstep));
            if (!sweep_lvalues.empty()) {
                game::ExplicitRule rule;
                for (const std::string& l : split_list(sweep_lvalues)) {
                    rule.l_values.push_back(Rational::parse(l));
                }
                grid.l_rule = rule;
            } else {
                grid.l_rule = game::OffsetRule{Rational::parse(sweep_loffset)};
            }
            grid.boundary_eps = Rational::parse(sweep_eps);
            const auto records = game::sweep_grid(grid);
            const std::string dir = resolve_out_dir(sweep_common.out, "sweep");
            recipes::write_manifest(dir, base_manifest(sweep_cmd));
            std::ofstream os(fs::path(dir) / "phase.csv");
            game::write_phase_table(os, records);
            std::cout << "wrote " << records.size() << " cells to " << dir << "/phase.csv\n";
            return 0;
        }

        if (mc->parsed()) {
            const auto g = game::canonical_game(Rational::parse(mc_k), Rational::parse(mc_l));
            game::ActionProfile profile{};
            if (mc_profile.size() != 2 ||
                (mc_profile[0] != 'A' && mc_profile[0] != 'C') ||
                (mc_profile[1] != 'A' && mc_profile[1] != 'C')) {
                throw DomainError("profile must be one of AA, AC, CA, CC");
            }
            profile.centrist = mc_profile[0] == 'A' ? game::MetaAction::Ambiguous
                                                    : game::MetaAction::Commit;
            profile.extremist = mc_profile[1] == 'A' ? game::MetaAction::Ambiguous
                                                     : game::MetaAction::Commit;
            const auto [pc, pe] = game::contest_win_probabilities(g, profile);
            const auto result = game::monte_carlo_check(g, profile, mc_n, mc_common.seed);
            const double exact = pc.to_double();
            std::cout << "exact centrist win probability: " << pc << " = " << exact << "\n";
            std::cout << "empirical frequency: " << result.frequency
                      << " (SE " << result.std_error << ", n " << result.n_samples << ")\n";
            const double z = result.std_error > 0
                                 ? (result.frequency - exact) / result.std_error
                                 : 0.0;
            std::cout << "z-score vs exact: " << z << "\n";
            return 0;
        }

        if (gen->parsed()) {
            dgp::PanelSpec spec;
            spec.n_countries = gen_countries;
            spec.n_waves = gen_waves;
            spec.parties_per_country = gen_parties;
            dgp::DGPParams params;
            if (gen_model == "centrism") params.model = dgp::BlurrinessModel::Centrism;
            else if (gen_model != "quadratic") throw DomainError("unknown model '" + gen_model + "'");

            PartyYearPanel panel = dgp::generate_panel(spec, params, gen_common.seed);
            const std::string dir = resolve_out_dir(gen_common.out, "gen");
            auto manifest = base_manifest(gen);
            manifest["seed"] = std::to_string(gen_common.seed);
            recipes::write_manifest(dir, manifest);

            if (gen_context || gen_theta_econ != 0.0 || gen_theta_social != 0.0) {
                dgp::ContextParams ctx;
                ctx.theta_economic = gen_theta_econ;
                ctx.theta_social = gen_theta_social;
                const auto table = dgp::generate_context(panel, ctx, gen_common.seed);
                std::ofstream os(fs::path(dir) / "context.csv");
                dgp::write_context_csv(os, table);
            }
            write_panel_csv_file((fs::path(dir) / "panel.csv").string(), panel);
            const auto experts =
                dgp::generate_expert_table(panel, gen_experts, gen_expert_sd, gen_common.seed);
            ingest::write_expert_csv_file((fs::path(dir) / "experts.csv").string(), experts);
            std::cout << "wrote panel.csv (" << panel.n_rows() << " rows) and experts.csv ("
                      << experts.rows.size() << " rows) to " << dir << "\n";
            return 0;
        }

        if (ingest_cmd->parsed()) {
            ingest::ReadOptions options;
            for (const std::string& pair : split_list(ingest_schema)) {
                const auto eq = pair.find('=');
                if (eq == std::string::npos) {
                    throw DomainError("schema entries look like field=column, got '" + pair + "'");
                }
                options.schema_map[pair.substr(0, eq)] = pair.substr(eq + 1);
            }
            for (const std::string& d : split_list(ingest_dims)) {
                options.dimension_registry.insert(d);
            }
            const auto table = ingest::read_expert_table_file(ingest_input, options);
            ingest::AggregationPolicy policy;
            policy.min_experts = ingest_min_experts;
            for (const std::string& d : split_list(ingest_dims)) policy.dimensions.insert(d);
            for (const std::string& y : split_list(ingest_years)) policy.year_filter.insert(std::stoi(y));
            const auto aggregation = ingest::aggregate_party_year(table, policy);

            const std::string dir = resolve_out_dir(ingest_common.out, "ingest");
            auto manifest = base_manifest(ingest_cmd);
            manifest["groups_total"] = std::to_string(aggregation.groups_total);
            manifest["groups_dropped"] = std::to_string(aggregation.groups_dropped);
            recipes::write_manifest(dir, manifest);
            write_panel_csv_file((fs::path(dir) / "panel.csv").string(), aggregation.panel);
            std::cout << "aggregated " << table.rows.size() << " expert rows into "
                      << aggregation.panel.n_rows() << " party-years (" << aggregation.groups_dropped
                      << " of " << aggregation.groups_total << " groups dropped) -> " << dir
                      << "/panel.csv\n";
            return 0;
        }

        if (fit_cmd->parsed()) {
            PartyYearPanel panel = read_panel_csv_file(fit_panel);
            econ::DesignSpec spec;
            spec.label = fit_label;
            spec.outcome = fit_outcome;
            for (const std::string& term : split_list(fit_regressors)) {
                spec.regressors.push_back(econ::Term::parse(term));
            }
            if (fit_fe != "none" && !fit_fe.empty()) {
                for (const std::string& dim : split_list(fit_fe)) {
                    if (dim == "country_year") spec.fixed_effects.country_year = true;
                    else if (dim == "party") spec.fixed_effects.party = true;
                    else throw DomainError("unknown FE dimension '" + dim + "'");
                }
            }
            spec.cluster = fit_cluster;
            bool iv = false;
            if (!fit_instruments.empty()) {
                iv = true;
                std::stringstream ss(fit_instruments);
                std::string entry;
                while (std::getline(ss, entry, ';')) {
                    const auto eq = entry.find('=');
                    if (eq == std::string::npos) {
                        throw DomainError("instrument entries look like term=col[+col], got '" +
                                          entry + "'");
                    }
                    std::vector<std::string> cols;
                    std::stringstream cs(entry.substr(eq + 1));
                    std::string col;
                    while (std::getline(cs, col, '+')) cols.push_back(col);
                    spec.instruments[entry.substr(0, eq)] = cols;
                }
            }
            const econ::FitResult fit =
                iv ? econ::fit_2sls(panel, spec) : econ::fit_ols_clustered(panel, spec);
            const std::string dir = resolve_out_dir(fit_common.out, "fit");
            recipes::write_manifest(dir, base_manifest(fit_cmd));
            std::ofstream os(fs::path(dir) / (fit_label + ".txt"));
            econ::write_fit_report(os, fit, fit_label);
            econ::write_fit_report(std::cout, fit, fit_label);
            return 0;
        }

        if (baseline->parsed()) {
            baseline_config.seed = baseline_common.seed;
            if (baseline_model == "centrism") {
                baseline_config.params.model = dgp::BlurrinessModel::Centrism;
            } else if (baseline_model != "quadratic") {
                throw DomainError("unknown model '" + baseline_model + "'");
            }
            return run_replicate_baseline(baseline, baseline_common, baseline_config);
        }

        if (mechanism->parsed()) {
            mech_config.seed = mech_common.seed;
            return run_replicate_mechanism(mechanism, mech_common, mech_config);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    return 0;
}
