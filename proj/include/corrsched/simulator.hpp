#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "corrsched/online.hpp"
#include "corrsched/problem.hpp"
#include "corrsched/spec_io.hpp"
#include "corrsched/strategy.hpp"

namespace corrsched {

struct SimConfig {
    DppConfig dpp;
    std::size_t horizon = 0;
    std::uint64_t seed = 0;
    std::vector<Phase> phases;  ///< empty means the spec's own distribution throughout
    std::size_t runs = 1;
    std::size_t trace_stride = 100;
    bool record_trace = true;
    PruneMode prune = PruneMode::Auto;
};

/// Scalar parameters of a SimConfig (phases are stored separately).
nlohmann::json sim_config_to_json(const SimConfig& config);
SimConfig sim_config_from_json(const nlohmann::json& j);

/// One recorded slot. q holds Q(t) at the start of the slot; the running
/// averages include slot t itself.
struct TraceRecord {
    std::uint64_t t = 0;
    std::int64_t strategy = -1;
    double u = 0.0;
    std::vector<double> p;
    std::vector<double> q;
    double ubar = 0.0;
    std::vector<double> pbar;
};

struct Trace {
    std::size_t num_constraints = 0;
    std::vector<TraceRecord> rows;
};

struct Metrics {
    std::uint64_t slots = 0;
    double ubar = 0.0;
    std::vector<double> pbar;
    std::vector<double> final_q;  ///< Q(T)
    /// (t, max_k pbar_k(t)) at every recorded slot.
    std::vector<std::pair<std::uint64_t, double>> max_pbar_series;
    /// Largest S_k(t)/t - c_k - Q_k(t)/t seen at any slot, S being the sum of applied penalties.
    double queue_identity_residual = 0.0;
    std::size_t strategy_count = 0;
};

nlohmann::json metrics_to_json(const Metrics& m);

struct EpisodeResult {
    Metrics metrics;
    Trace trace;
};

/// Per-slot means over an ensemble of runs with seeds base_seed + run_index.
struct EnsembleResult {
    std::size_t runs = 0;
    std::vector<double> mean_u;                 ///< [t]
    std::vector<std::vector<double>> mean_p;    ///< [k][t]
    std::vector<double> mean_q_norm;            ///< [t], ||Q(t)|| for t = 0..T
    std::size_t block = 0;
    std::vector<std::vector<double>> block_u;   ///< [run][b], mean u over slots [b*block, (b+1)*block)
    std::vector<double> final_ubar;             ///< [run]
    double queue_identity_residual = 0.0;       ///< worst over all runs and slots
};

/// Precomputed state shared by every run of one configuration.
class Simulation {
public:
    /// Validates the configuration; the spec must outlive the object.
    Simulation(const ProblemSpec& spec, SimConfig config);

    const SimConfig& config() const noexcept { return config_; }
    const std::vector<PureStrategy>& strategies() const noexcept { return strategies_; }

    EpisodeResult run(std::uint64_t seed, bool record_trace) const;
    EpisodeResult run() const { return run(config_.seed, config_.record_trace); }

    /// Runs config.runs independent episodes, spread across threads. The
    /// reduction order is fixed, so results do not depend on the thread count.
    EnsembleResult run_ensemble(unsigned threads = 0) const;

private:
    template <class Sink>
    void simulate(std::uint64_t seed, Sink& sink) const;
    std::int64_t separable_rank(std::span<const double> q) const;
    const EventDistribution& distribution_at(std::uint64_t t, std::size_t& phase_hint) const;

    const ProblemSpec* spec_;
    SimConfig config_;
    PenaltyTable table_;
    std::vector<PureStrategy> strategies_;
    std::optional<StrategySet> set_;
    std::vector<double> exact_r_;  // M x (K + 1), Exact mode
    std::optional<SeparableModel> separable_;
};

EpisodeResult run_episode(const ProblemSpec& spec, const SimConfig& config);
EnsembleResult run_ensemble(const ProblemSpec& spec, const SimConfig& config, unsigned threads = 0);

/// Recomputes the running averages from per-slot values. Needs rows t = 0, 1, 2, ...
Metrics summarize(const Trace& trace);

void write_trace(const Trace& trace, const std::filesystem::path& path);
Trace read_trace(const std::filesystem::path& path);

}  // namespace corrsched
