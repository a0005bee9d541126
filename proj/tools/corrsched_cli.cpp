// Command-line front end: solve, simulate, analyze, counterexample, compare.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "corrsched/analysis.hpp"
#include "corrsched/errors.hpp"
#include "corrsched/optimizer.hpp"
#include "corrsched/simulator.hpp"
#include "corrsched/spec_io.hpp"
#include "corrsched/strategy.hpp"

using nlohmann::json;
using namespace corrsched;

namespace {

constexpr int kAuditFailed = 3;

PruneMode parse_prune(const std::string& s) {
    if (s == "auto") return PruneMode::Auto;
    if (s == "off") return PruneMode::Off;
    return PruneMode::Force;
}

json strategy_json(const PureStrategy& s) { return s.maps; }

int cmd_solve(const std::string& spec_path, const std::string& prune, const std::string& out_path) {
    const ProblemSpec spec = load_spec(spec_path);
    const PruneMode mode = parse_prune(prune);
    const bool pruned = mode == PruneMode::Force || (mode == PruneMode::Auto && prune_applicable(spec));
    const auto strategies = candidate_strategies(spec, mode);
    const CorrelatedPolicy policy = solve_distributed_lp(spec, strategies);

    json support = json::array();
    for (const auto& e : policy.support) {
        support.push_back({{"index", e.index}, {"theta", e.theta}, {"maps", strategy_json(e.strategy)}, {"r", e.r.values}});
    }
    const json out = {{"strategy_count", strategies.size()},
                      {"pruned", pruned},
                      {"objective", policy.objective},
                      {"utility", policy.utility()},
                      {"achieved", policy.achieved},
                      {"constraints", spec.constraints},
                      {"support", support}};
    write_json_file(out, out_path);
    std::cout << "utility " << policy.utility() << " with " << policy.support.size() << " of " << strategies.size()
              << " strategies in the support\n";
    return 0;
}

struct SimulateArgs {
    std::string spec;
    double V = 1.0;
    std::size_t delay = 0;
    std::size_t window = 40;
    std::size_t slots = 0;
    std::uint64_t seed = 0;
    std::string mode = "approx";
    std::string phases;
    std::size_t runs = 1;
    std::size_t stride = 100;
    std::string prune = "auto";
    std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
    const ProblemSpec spec = load_spec(a.spec);
    SimConfig cfg;
    cfg.dpp.V = a.V;
    cfg.dpp.D = a.delay;
    cfg.dpp.W = a.window;
    cfg.dpp.mode = parse_dpp_mode(a.mode);
    cfg.horizon = a.slots;
    cfg.seed = a.seed;
    cfg.runs = a.runs;
    cfg.trace_stride = a.stride;
    cfg.prune = parse_prune(a.prune);
    json phases_json;
    if (!a.phases.empty()) {
        phases_json = read_json_file(a.phases);
        cfg.phases = phases_from_json(phases_json, spec.events);
    }

    const Simulation sim(spec, cfg);
    const EpisodeResult episode = sim.run();
    json metrics = metrics_to_json(episode.metrics);
    metrics["seed"] = cfg.seed;

    if (cfg.runs > 1) {
        const EnsembleResult ens = sim.run_ensemble();
        double mean = 0.0;
        for (double v : ens.final_ubar) mean += v;
        mean /= static_cast<double>(ens.runs);
        double var = 0.0;
        for (double v : ens.final_ubar) var += (v - mean) * (v - mean);
        var /= static_cast<double>(ens.runs - 1);
        metrics["ensemble"] = {{"runs", ens.runs},
                               {"seeds", {cfg.seed, cfg.seed + ens.runs - 1}},
                               {"mean_final_ubar", mean},
                               {"stderr_final_ubar", std::sqrt(var / static_cast<double>(ens.runs))},
                               {"mean_final_q_norm", ens.mean_q_norm.back()},
                               {"queue_identity_residual", ens.queue_identity_residual}};
    }

    const std::string prefix = a.out;
    json config = sim_config_to_json(cfg);
    if (!phases_json.is_null()) config["phases"] = phases_json;
    write_json_file(metrics, prefix + ".metrics");
    write_trace(episode.trace, prefix + ".trace.csv");
    write_json_file(config, prefix + ".config.json");
    std::printf("ubar %.6f", episode.metrics.ubar);
    for (std::size_t k = 0; k < episode.metrics.pbar.size(); ++k) std::printf("  pbar_%zu %.6f", k + 1, episode.metrics.pbar[k]);
    std::printf("\n");
    return 0;
}

int cmd_analyze(const std::string& trace_path, const std::string& spec_path, const std::string& config_path) {
    const ProblemSpec spec = load_spec(spec_path);
    const json cj = read_json_file(config_path);
    SimConfig cfg = sim_config_from_json(cj);
    if (cj.contains("phases")) cfg.phases = phases_from_json(cj.at("phases"), spec.events);
    const Trace trace = read_trace(trace_path);
    const BoundReport rep = audit_bounds(trace, spec, cfg);
    std::cout << rep.to_json().dump(2) << '\n';
    return rep.ok() ? 0 : kAuditFailed;
}

int cmd_counterexample() {
    const CounterexampleResult res = verify_counterexample();
    const ProblemSpec spec = counterexample_spec();
    json table = json::array();
    for (int w1 = 0; w1 < 2; ++w1) {
        for (int w2 = 0; w2 < 2; ++w2) {
            for (int a1 = 0; a1 < 2; ++a1) {
                for (int a2 = 0; a2 < 2; ++a2) {
                    const int alpha[] = {a1, a2};
                    const int omega[] = {w1, w2};
                    table.push_back({{"omega", {w1, w2}},
                                     {"alpha", {2 * a1 - 1, 2 * a2 - 1}},
                                     {"utility", -eval_penalty(spec, 0, alpha, omega)}});
                }
            }
        }
    }
    json support = json::array();
    for (const auto& e : res.distributed_policy.support) support.push_back({{"theta", e.theta}, {"maps", e.strategy.maps}});
    const json out = {{"centralized", res.centralized},
                      {"distributed", res.distributed},
                      {"distributed_support", support},
                      {"utility_table", table}};
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_compare(const std::string& spec_path, const std::string& prune) {
    const ProblemSpec spec = load_spec(spec_path);
    std::cout << compare_policies(spec, parse_prune(prune)).to_json().dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Correlated scheduling of distributed users: LP solver, online controller and simulator"};
    app.require_subcommand(1);
    const auto prune_check = CLI::IsMember({"auto", "off", "force"});

    std::string spec_path, out_path, prune = "auto";
    auto* solve = app.add_subcommand("solve", "Solve the offline mixing LP over pure strategies");
    solve->add_option("--spec", spec_path, "Problem file")->required()->check(CLI::ExistingFile);
    solve->add_option("--prune", prune, "Restrict to non-decreasing strategies")->check(prune_check);
    solve->add_option("--out", out_path, "Output file")->required();

    SimulateArgs sa;
    auto* simulate = app.add_subcommand("simulate", "Run the online drift-plus-penalty controller");
    simulate->add_option("--spec", sa.spec, "Problem file")->required()->check(CLI::ExistingFile);
    simulate->add_option("--v", sa.V, "Utility weight V")->required()->check(CLI::NonNegativeNumber);
    simulate->add_option("--delay", sa.delay, "Feedback delay D in slots")->required();
    simulate->add_option("--window", sa.window, "Estimator window W")->required()->check(CLI::PositiveNumber);
    simulate->add_option("--slots", sa.slots, "Horizon T")->required()->check(CLI::PositiveNumber);
    simulate->add_option("--seed", sa.seed, "Base seed")->required();
    simulate->add_option("--mode", sa.mode, "Controller")->check(CLI::IsMember({"exact", "approx", "separable"}));
    simulate->add_option("--phases", sa.phases, "Distribution schedule")->check(CLI::ExistingFile);
    simulate->add_option("--runs", sa.runs, "Ensemble size")->check(CLI::PositiveNumber);
    simulate->add_option("--stride", sa.stride, "Trace stride")->check(CLI::PositiveNumber);
    simulate->add_option("--prune", sa.prune, "Strategy pruning")->check(prune_check);
    simulate->add_option("--out", sa.out, "Output prefix")->required();

    std::string trace_path, config_path;
    auto* analyze = app.add_subcommand("analyze", "Audit a trace against the theoretical bounds");
    analyze->add_option("--trace", trace_path, "Trace CSV")->required()->check(CLI::ExistingFile);
    analyze->add_option("--spec", spec_path, "Problem file")->required()->check(CLI::ExistingFile);
    analyze->add_option("--config", config_path, "Run configuration")->required()->check(CLI::ExistingFile);

    auto* counterexample = app.add_subcommand("counterexample", "Centralized vs distributed gap on a two-user XOR game");

    auto* compare = app.add_subcommand("compare", "Independent, distributed and centralized optima");
    compare->add_option("--spec", spec_path, "Problem file")->required()->check(CLI::ExistingFile);
    compare->add_option("--prune", prune, "Strategy pruning")->check(prune_check);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) return cmd_solve(spec_path, prune, out_path);
        if (*simulate) return cmd_simulate(sa);
        if (*analyze) return cmd_analyze(trace_path, spec_path, config_path);
        if (*counterexample) return cmd_counterexample();
        if (*compare) return cmd_compare(spec_path, prune);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
