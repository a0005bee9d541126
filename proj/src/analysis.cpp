#include "corrsched/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "corrsched/errors.hpp"
#include "corrsched/online.hpp"

namespace corrsched {

ProblemSpec counterexample_spec() {
    const IndexSpace actions({2, 2});
    const IndexSpace events({2, 2});
    FullTable table{actions, events, std::vector<double>(16, 0.0)};
    for (int w1 = 0; w1 < 2; ++w1) {
        for (int w2 = 0; w2 < 2; ++w2) {
            for (int a1 = 0; a1 < 2; ++a1) {
                for (int a2 = 0; a2 < 2; ++a2) {
                    const double g = 1.0 - 2.0 * w1 * w2;
                    const double u = g * (2 * a1 - 1) * (2 * a2 - 1);
                    const int wf = w1 * 2 + w2;
                    const int af = a1 * 2 + a2;
                    table.values[static_cast<std::size_t>(wf * 4 + af)] = -u;
                }
            }
        }
    }
    return ProblemSpec({2, 2}, {2, 2}, EventDistribution::joint({0.25, 0.25, 0.25, 0.25}), {PenaltyFn(table)}, {});
}

CounterexampleResult verify_counterexample() {
    const ProblemSpec spec = counterexample_spec();
    CounterexampleResult res;
    res.centralized = solve_centralized_lp(spec).utility();
    res.distributed_policy = solve_distributed_lp(spec, enumerate_all(spec));
    res.distributed = res.distributed_policy.utility();
    return res;
}

namespace {

struct ProbeState {
    const ProblemSpec& spec;
    double best_obj = std::numeric_limits<double>::infinity();
    IndependentPolicy best;

    // Objective of a feasible policy, +inf otherwise.
    double score(const IndependentPolicy& pol) const {
        const RVector r = evaluate_independent_policy(spec, pol);
        for (std::size_t k = 0; k < spec.num_constraints(); ++k) {
            if (r[k + 1] > spec.constraints[k] + 1e-12) return std::numeric_limits<double>::infinity();
        }
        return r[0];
    }

    void offer(const IndependentPolicy& pol) {
        const double s = score(pol);
        if (s < best_obj) {
            best_obj = s;
            best = pol;
        }
    }
};

IndependentPolicy pure_policy(const ProblemSpec& spec, const PureStrategy& s) {
    IndependentPolicy pol(spec.users());
    for (std::size_t i = 0; i < spec.users(); ++i) {
        for (int a : s.maps[i]) {
            std::vector<double> dist(static_cast<std::size_t>(spec.actions.size(i)), 0.0);
            dist[static_cast<std::size_t>(a)] = 1.0;
            pol[i].push_back(std::move(dist));
        }
    }
    return pol;
}

// Coordinate search that moves probability mass between two actions of one
// (user, event) pair, halving the step when no move improves.
void compass_refine(ProbeState& st) {
    if (!std::isfinite(st.best_obj)) return;
    IndependentPolicy cur = st.best;
    double cur_obj = st.best_obj;
    for (double step = 0.25; step >= 1e-10;) {
        bool improved = false;
        for (std::size_t i = 0; i < cur.size(); ++i) {
            for (std::size_t w = 0; w < cur[i].size(); ++w) {
                const std::size_t na = cur[i][w].size();
                for (std::size_t from = 0; from < na; ++from) {
                    for (std::size_t to = 0; to < na; ++to) {
                        if (from == to || cur[i][w][from] <= 0.0) continue;
                        IndependentPolicy trial = cur;
                        const double d = std::min(step, trial[i][w][from]);
                        trial[i][w][from] -= d;
                        trial[i][w][to] += d;
                        const double s = st.score(trial);
                        if (s < cur_obj - 1e-15) {
                            cur = std::move(trial);
                            cur_obj = s;
                            improved = true;
                        }
                    }
                }
            }
        }
        if (!improved) step /= 2.0;
    }
    if (cur_obj < st.best_obj) {
        st.best_obj = cur_obj;
        st.best = std::move(cur);
    }
}

}  // namespace

std::pair<IndependentPolicy, double> probe_independent(const ProblemSpec& spec) {
    ProbeState st{spec, std::numeric_limits<double>::infinity(), {}};

    // Every pure strategy is also an independent policy.
    if (count_all_strategies(spec) <= 20'000) {
        for (const auto& s : enumerate_all(spec)) st.offer(pure_policy(spec, s));
    }

    // Coarse grid on the reporting probabilities of binary-action problems.
    bool binary = true;
    std::size_t params = 0;
    for (std::size_t i = 0; i < spec.users(); ++i) {
        binary = binary && spec.actions.size(i) == 2;
        params += static_cast<std::size_t>(spec.events.size(i));
    }
    if (binary && params <= 8) {
        std::size_t total = 1;
        for (std::size_t j = 0; j < params; ++j) total *= 3;
        for (std::size_t code = 0; code < total; ++code) {
            IndependentPolicy pol(spec.users());
            std::size_t c = code;
            for (std::size_t i = 0; i < spec.users(); ++i) {
                for (int w = 0; w < spec.events.size(i); ++w) {
                    const double q = 0.5 * static_cast<double>(c % 3);
                    c /= 3;
                    pol[i].push_back({1.0 - q, q});
                }
            }
            st.offer(pol);
        }
    }

    compass_refine(st);
    if (!std::isfinite(st.best_obj)) return {{}, std::numeric_limits<double>::quiet_NaN()};
    return {st.best, -st.best_obj};
}

nlohmann::json ComparisonReport::to_json() const {
    nlohmann::json j = {{"independent_best", independent_best},
                        {"distributed_opt", distributed_opt},
                        {"centralized_opt", centralized_opt},
                        {"gap_centralized_distributed", gap_centralized_distributed},
                        {"gap_distributed_independent", gap_distributed_independent},
                        {"strategy_count", strategy_count}};
    if (std::isnan(independent_best)) j["independent_best"] = nullptr;
    if (std::isnan(gap_distributed_independent)) j["gap_distributed_independent"] = nullptr;
    j["independent_policy"] = independent_policy;
    return j;
}

ComparisonReport compare_policies(const ProblemSpec& spec, PruneMode prune) {
    ComparisonReport rep;
    const auto strategies = candidate_strategies(spec, prune);
    rep.strategy_count = strategies.size();
    rep.distributed_opt = solve_distributed_lp(spec, strategies).utility();
    rep.centralized_opt = solve_centralized_lp(spec).utility();
    auto [pol, value] = probe_independent(spec);
    rep.independent_policy = std::move(pol);
    rep.independent_best = value;
    rep.gap_centralized_distributed = rep.centralized_opt - rep.distributed_opt;
    rep.gap_distributed_independent = rep.distributed_opt - rep.independent_best;
    return rep;
}

bool slack_feasible(const std::vector<RVector>& r, const std::vector<double>& constraints, double eps) {
    return solve_lp(build_distributed_lp(r, constraints, eps)).status == LpStatus::Optimal;
}

double epsilon_max(const std::vector<RVector>& r, const std::vector<double>& constraints, double tol) {
    if (r.empty()) throw std::invalid_argument("epsilon_max: empty strategy set");
    if (constraints.empty()) return std::numeric_limits<double>::infinity();
    // Any mixture meets slack lo; no mixture can meet a slack above hi.
    double lo = std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < constraints.size(); ++k) {
        double rmax = -std::numeric_limits<double>::infinity();
        double rmin = std::numeric_limits<double>::infinity();
        for (const auto& v : r) {
            rmax = std::max(rmax, v[k + 1]);
            rmin = std::min(rmin, v[k + 1]);
        }
        lo = std::min(lo, constraints[k] - rmax);
        hi = std::min(hi, constraints[k] - rmin);
    }
    if (slack_feasible(r, constraints, hi)) return hi;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (slack_feasible(r, constraints, mid) ? lo : hi) = mid;
    }
    return lo;
}

nlohmann::json SlaterAudit::to_json() const {
    return {{"applicable", applicable}, {"note", note},       {"eps_max", eps_max},     {"G_eps_max", g_eps},
            {"B", B},                   {"F", F},             {"A", A},                 {"delta_max", delta_max},
            {"checked", checked},       {"violations", violations}, {"worst_margin", worst_margin}};
}

SlaterAudit audit_slater(const ProblemSpec& spec, const std::vector<PureStrategy>& strategies, double V,
                         std::size_t D, const std::vector<double>& mean_q_norm) {
    SlaterAudit a;
    if (D != 0) {
        a.note = "queue bound under a Slater slack is only stated for zero delay";
        return a;
    }
    if (spec.num_constraints() == 0) {
        a.note = "no constraints";
        return a;
    }
    const StrategySet set(spec, strategies);
    const auto r = compute_r_vectors(spec, set);
    a.eps_max = epsilon_max(r, spec.constraints);
    if (!(a.eps_max > 0.0)) {
        a.note = "Slater condition fails (eps_max <= 0)";
        return a;
    }
    a.applicable = true;
    a.g_eps = solve_distributed_lp(strategies, r, [&] {
                  auto c = spec.constraints;
                  for (double& v : c) v -= a.eps_max;
                  return c;
              }()).objective;
    a.B = compute_B(spec, strategies);
    a.F = compute_F(spec, r, a.g_eps);
    a.A = a.B + a.F * V;
    a.delta_max = compute_delta_max(spec);
    a.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t t = 1; t < mean_q_norm.size(); ++t) {
        const double bound = slater_queue_bound(a.A, a.eps_max, a.delta_max, static_cast<double>(t));
        const double margin = bound - mean_q_norm[t];
        ++a.checked;
        if (margin < 0.0) ++a.violations;
        a.worst_margin = std::min(a.worst_margin, margin);
    }
    return a;
}

bool BoundReport::ok() const noexcept {
    return performance_violations == 0 && identity_worst_residual <= 1e-9;
}

nlohmann::json BoundReport::to_json() const {
    return {{"ok", ok()},
            {"p0_opt", p0_opt},
            {"B", B},
            {"V", V},
            {"delay", D},
            {"sigma", sigma},
            {"performance",
             {{"applicable", performance_applicable},
              {"note", performance_note},
              {"checked", performance_checked},
              {"violations", performance_violations},
              {"worst_margin", performance_worst_margin}}},
            {"queue_identity", {{"checked", identity_checked}, {"worst_residual", identity_worst_residual}}},
            {"slater_single_path", slater.to_json()}};
}

BoundReport audit_bounds(const Trace& trace, const ProblemSpec& spec, const SimConfig& config) {
    if (trace.num_constraints != spec.num_constraints()) {
        throw std::invalid_argument("audit_bounds: trace and spec disagree on the number of constraints");
    }
    BoundReport rep;
    rep.V = config.dpp.V;
    rep.D = config.dpp.D;
    const std::size_t K = spec.num_constraints();

    // Queue identity: S_k(t) = sum of p_k over slots [0, t - D) equals
    // (t - D) * pbar_k(t - D - 1) whenever that row was recorded.
    std::map<std::uint64_t, const TraceRecord*> by_t;
    for (const auto& row : trace.rows) by_t[row.t] = &row;
    rep.identity_worst_residual = K == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    for (const auto& row : trace.rows) {
        if (row.t == 0 || K == 0) continue;
        const double t = static_cast<double>(row.t);
        std::vector<double> S(K, 0.0);
        if (row.t > rep.D) {
            const auto it = by_t.find(row.t - rep.D - 1);
            if (it == by_t.end()) continue;
            for (std::size_t k = 0; k < K; ++k) S[k] = static_cast<double>(row.t - rep.D) * it->second->pbar[k];
        }
        ++rep.identity_checked;
        for (std::size_t k = 0; k < K; ++k) {
            rep.identity_worst_residual =
                std::max(rep.identity_worst_residual, S[k] / t - spec.constraints[k] - row.q[k] / t);
        }
    }
    if (rep.identity_checked == 0) rep.identity_worst_residual = 0.0;

    const auto strategies = candidate_strategies(spec, config.prune);
    const auto [lo, hi] = penalty_range(spec, 0);
    rep.sigma = 0.5 * (hi - lo);
    rep.p0_opt = solve_distributed_lp(spec, strategies).objective;
    rep.B = compute_B(spec, strategies);

    if (config.dpp.mode != DppMode::Exact) {
        rep.performance_note = "performance bound is stated for the exact controller only";
    } else if (!config.phases.empty()) {
        rep.performance_note = "performance bound assumes one fixed event distribution";
    } else if (!(config.dpp.V > 0.0)) {
        rep.performance_note = "performance bound needs V > 0";
    } else {
        rep.performance_applicable = true;
        rep.performance_worst_margin = std::numeric_limits<double>::infinity();
        for (const auto& row : trace.rows) {
            const double n = static_cast<double>(row.t + 1);
            const double bound = performance_bound(rep.B, rep.D, rep.V, n, 0.0, rep.p0_opt);
            const double margin = bound + 3.0 * rep.sigma / std::sqrt(n) - (-row.ubar);
            ++rep.performance_checked;
            if (margin < 0.0) ++rep.performance_violations;
            rep.performance_worst_margin = std::min(rep.performance_worst_margin, margin);
        }
    }

    // Single path, so only a sanity comparison against the expectation bound.
    std::vector<double> q_norm;
    bool contiguous = !trace.rows.empty();
    for (std::size_t i = 0; i < trace.rows.size() && contiguous; ++i) {
        contiguous = trace.rows[i].t == i;
        double sq = 0.0;
        for (double v : trace.rows[i].q) sq += v * v;
        q_norm.push_back(std::sqrt(sq));
    }
    if (contiguous) {
        rep.slater = audit_slater(spec, strategies, rep.V, rep.D, q_norm);
    } else {
        rep.slater.note = "needs a trace recorded at every slot";
    }
    return rep;
}

}  // namespace corrsched
