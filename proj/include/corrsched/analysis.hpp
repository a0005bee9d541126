#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "corrsched/optimizer.hpp"
#include "corrsched/problem.hpp"
#include "corrsched/simulator.hpp"
#include "corrsched/strategy.hpp"

namespace corrsched {

/// Two users with equiprobable binary events and actions {-1, +1} stored as
/// {0, 1}; utility (1 - 2 w1 w2) a1 a2 as a full table, no constraints.
ProblemSpec counterexample_spec();

struct CounterexampleResult {
    double centralized = 0.0;
    double distributed = 0.0;
    CorrelatedPolicy distributed_policy;
};

CounterexampleResult verify_counterexample();

struct ComparisonReport {
    double independent_best = 0.0;  ///< best probed independent utility (NaN when none was feasible)
    IndependentPolicy independent_policy;
    double distributed_opt = 0.0;
    double centralized_opt = 0.0;
    double gap_centralized_distributed = 0.0;
    double gap_distributed_independent = 0.0;
    std::size_t strategy_count = 0;

    nlohmann::json to_json() const;
};

/// Best independent randomization found by a grid and compass-search probe.
/// Returns the policy and its utility; utility is NaN when no feasible point was found.
std::pair<IndependentPolicy, double> probe_independent(const ProblemSpec& spec);

ComparisonReport compare_policies(const ProblemSpec& spec, PruneMode prune = PruneMode::Auto);

/// Feasibility of the mixing LP with every constraint tightened by eps.
bool slack_feasible(const std::vector<RVector>& r, const std::vector<double>& constraints, double eps);

/// Largest uniform slack for which the tightened LP is still feasible, by
/// bisection to `tol`. Infinite when there are no constraints.
double epsilon_max(const std::vector<RVector>& r, const std::vector<double>& constraints, double tol = 1e-9);

struct SlaterAudit {
    bool applicable = false;
    std::string note;
    double eps_max = 0.0;
    double g_eps = 0.0;     ///< LP optimum at slack eps_max
    double B = 0.0;
    double F = 0.0;
    double A = 0.0;
    double delta_max = 0.0;
    std::size_t checked = 0;
    std::size_t violations = 0;
    double worst_margin = 0.0;  ///< min over t of bound(t) - E||Q(t)||

    nlohmann::json to_json() const;
};

/// Compares a mean ||Q(t)|| series (index t = 0..T) against the Slater queue bound.
SlaterAudit audit_slater(const ProblemSpec& spec, const std::vector<PureStrategy>& strategies, double V,
                         std::size_t D, const std::vector<double>& mean_q_norm);

struct BoundReport {
    double p0_opt = 0.0;
    double B = 0.0;
    double V = 0.0;
    std::size_t D = 0;
    double sigma = 0.0;  ///< per-slot standard deviation bound used for the slack

    bool performance_applicable = false;
    std::string performance_note;
    std::size_t performance_checked = 0;
    std::size_t performance_violations = 0;
    double performance_worst_margin = 0.0;  ///< min of bound + slack - pbar_0

    std::size_t identity_checked = 0;
    double identity_worst_residual = 0.0;

    SlaterAudit slater;  ///< single-path comparison, informational only

    bool ok() const noexcept;
    nlohmann::json to_json() const;
};

/// Audits a recorded trace: the time-average performance bound with 3 sigma
/// slack at each recorded slot, and the queue identity wherever the trace
/// contains the rows needed to rebuild the applied penalty sums.
BoundReport audit_bounds(const Trace& trace, const ProblemSpec& spec, const SimConfig& config);

}  // namespace corrsched
