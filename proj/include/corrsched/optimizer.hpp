#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "corrsched/lp.hpp"
#include "corrsched/problem.hpp"
#include "corrsched/rng.hpp"
#include "corrsched/strategy.hpp"

namespace corrsched {

struct SupportEntry {
    std::size_t index = 0;  ///< position in the candidate strategy list
    PureStrategy strategy;
    double theta = 0.0;
    RVector r;
};

/// A correlated schedule: every slot all users draw one shared index and
/// follow the corresponding pure strategy.
struct CorrelatedPolicy {
    std::vector<SupportEntry> support;
    double objective = 0.0;           ///< sum_m theta_m r_0^(m)
    std::vector<double> achieved;     ///< sum_m theta_m r_k^(m), k = 1..K

    double utility() const noexcept { return -objective; }
};

/// Randomized per-event schedule of a central controller seeing all events.
struct CentralizedPolicy {
    std::vector<std::vector<double>> conditional;  ///< [omega_flat][alpha_flat]
    double objective = 0.0;
    std::vector<double> achieved;

    double utility() const noexcept { return -objective; }
};

/// Per-user randomized maps: probabilities[user][omega_i][alpha_i].
using IndependentPolicy = std::vector<std::vector<std::vector<double>>>;

/// The LP over mixing weights with every constraint tightened by `slack`.
LpProblem build_distributed_lp(const std::vector<RVector>& r, const std::vector<double>& constraints,
                               double slack = 0.0);

/// Optimal mixing over the given strategies; throws Infeasible.
CorrelatedPolicy solve_distributed_lp(const ProblemSpec& spec, const std::vector<PureStrategy>& strategies);
CorrelatedPolicy solve_distributed_lp(const std::vector<PureStrategy>& strategies,
                                      const std::vector<RVector>& r, const std::vector<double>& constraints);

inline constexpr std::uint64_t kCentralizedCap = 100'000;

/// Optimal centralized randomization theta(alpha | omega); throws Infeasible.
CentralizedPolicy solve_centralized_lp(const ProblemSpec& spec, std::uint64_t cap = kCentralizedCap);

/// Exact expected penalties when users randomize independently on their own events.
RVector evaluate_independent_policy(const ProblemSpec& spec, const IndependentPolicy& policy);

/// Support position drawn with probability theta from the shared generator.
std::size_t sample_strategy(const CorrelatedPolicy& policy, Rng& rng);

/// Test oracle: best objective over every basic solution with at most K + 1
/// strategies, each found by solving its square system directly.
/// Throws CapExceeded past 50 strategies or K > 2, Infeasible when none is feasible.
double brute_force_distributed_oracle(const std::vector<RVector>& r, const std::vector<double>& constraints);
double brute_force_distributed_oracle(const ProblemSpec& spec, const std::vector<PureStrategy>& strategies);

}  // namespace corrsched
