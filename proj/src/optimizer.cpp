#include "corrsched/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "corrsched/errors.hpp"

namespace corrsched {

namespace {

constexpr double kFeasTol = 1e-9;

// Solves the square system in place by Gaussian elimination with partial
// pivoting; false when singular.
bool solve_square(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t i = col + 1; i < n; ++i) {
            if (std::abs(a[i][col]) > std::abs(a[piv][col])) piv = i;
        }
        if (std::abs(a[piv][col]) < 1e-12) return false;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t i = col + 1; i < n; ++i) {
            const double f = a[i][col] / a[col][col];
            for (std::size_t j = col; j < n; ++j) a[i][j] -= f * a[col][j];
            b[i] -= f * b[col];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return true;
}

template <class F>
void for_each_subset(std::size_t n, std::size_t k, F&& f) {
    if (k > n) return;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        f(idx);
        std::size_t pos = k;
        while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
        if (pos == 0) return;
        ++idx[pos - 1];
        for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }
}

}  // namespace

LpProblem build_distributed_lp(const std::vector<RVector>& r, const std::vector<double>& constraints, double slack) {
    LpProblem lp;
    const std::size_t m = r.size();
    lp.cost.resize(m);
    for (std::size_t j = 0; j < m; ++j) lp.cost[j] = r[j][0];
    for (std::size_t k = 0; k < constraints.size(); ++k) {
        std::vector<double> row(m);
        for (std::size_t j = 0; j < m; ++j) row[j] = r[j][k + 1];
        lp.ub_rows.push_back(std::move(row));
        lp.ub_rhs.push_back(constraints[k] - slack);
    }
    lp.eq_rows.push_back(std::vector<double>(m, 1.0));
    lp.eq_rhs.push_back(1.0);
    return lp;
}

CorrelatedPolicy solve_distributed_lp(const std::vector<PureStrategy>& strategies, const std::vector<RVector>& r,
                                      const std::vector<double>& constraints) {
    if (strategies.empty()) throw std::invalid_argument("solve_distributed_lp: empty strategy set");
    if (strategies.size() != r.size()) throw std::invalid_argument("solve_distributed_lp: r-vector count mismatch");
    const LpSolution sol = solve_lp(build_distributed_lp(r, constraints));
    if (sol.status == LpStatus::Infeasible) throw Infeasible("distributed LP: constraints cannot be met");
    if (sol.status != LpStatus::Optimal) throw std::runtime_error("distributed LP: " + to_string(sol.status));

    CorrelatedPolicy policy;
    policy.achieved.assign(constraints.size(), 0.0);
    for (std::size_t m = 0; m < strategies.size(); ++m) {
        if (sol.x[m] <= 0.0) continue;
        policy.support.push_back({m, strategies[m], sol.x[m], r[m]});
        policy.objective += sol.x[m] * r[m][0];
        for (std::size_t k = 0; k < constraints.size(); ++k) policy.achieved[k] += sol.x[m] * r[m][k + 1];
    }
    return policy;
}

CorrelatedPolicy solve_distributed_lp(const ProblemSpec& spec, const std::vector<PureStrategy>& strategies) {
    const PenaltyTable table(spec);
    std::vector<RVector> r;
    r.reserve(strategies.size());
    for (const auto& s : strategies) r.push_back(compute_r_vector(spec, table, s));
    return solve_distributed_lp(strategies, r, spec.constraints);
}

CentralizedPolicy solve_centralized_lp(const ProblemSpec& spec, std::uint64_t cap) {
    const std::uint64_t size = saturating_mul(spec.actions.total(), spec.events.total());
    if (size > cap) throw CapExceeded("solve_centralized_lp", size, cap);

    const std::size_t na = spec.actions.total();
    const std::size_t K = spec.num_constraints();
    const PenaltyTable table(spec);

    std::vector<std::size_t> live;  // events with positive probability
    for (std::size_t wf = 0; wf < spec.events.total(); ++wf) {
        if (spec.distribution.probability_flat(spec.events, wf) > 0.0) live.push_back(wf);
    }
    const std::size_t n = live.size() * na;

    LpProblem lp;
    lp.cost.assign(n, 0.0);
    lp.ub_rows.assign(K, std::vector<double>(n, 0.0));
    lp.ub_rhs = spec.constraints;
    for (std::size_t e = 0; e < live.size(); ++e) {
        const std::size_t wf = live[e];
        const double pi = spec.distribution.probability_flat(spec.events, wf);
        std::vector<double> norm(n, 0.0);
        for (std::size_t af = 0; af < na; ++af) {
            const std::size_t j = e * na + af;
            lp.cost[j] = pi * table.at(wf, af, 0);
            for (std::size_t k = 0; k < K; ++k) lp.ub_rows[k][j] = pi * table.at(wf, af, k + 1);
            norm[j] = 1.0;
        }
        lp.eq_rows.push_back(std::move(norm));
        lp.eq_rhs.push_back(1.0);
    }

    const LpSolution sol = solve_lp(lp);
    if (sol.status == LpStatus::Infeasible) throw Infeasible("centralized LP: constraints cannot be met");
    if (sol.status != LpStatus::Optimal) throw std::runtime_error("centralized LP: " + to_string(sol.status));

    CentralizedPolicy policy;
    policy.conditional.assign(spec.events.total(), std::vector<double>(na, 0.0));
    for (auto& row : policy.conditional) row[0] = 1.0;
    policy.achieved.assign(K, 0.0);
    for (std::size_t e = 0; e < live.size(); ++e) {
        auto& row = policy.conditional[live[e]];
        row[0] = 0.0;
        for (std::size_t af = 0; af < na; ++af) row[af] = sol.x[e * na + af];
    }
    policy.objective = sol.objective;
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t j = 0; j < n; ++j) policy.achieved[k] += lp.ub_rows[k][j] * sol.x[j];
    }
    return policy;
}

RVector evaluate_independent_policy(const ProblemSpec& spec, const IndependentPolicy& policy) {
    const std::size_t n_users = spec.users();
    if (policy.size() != n_users) throw std::invalid_argument("evaluate_independent_policy: wrong user count");
    for (std::size_t i = 0; i < n_users; ++i) {
        if (policy[i].size() != static_cast<std::size_t>(spec.events.size(i))) {
            throw std::invalid_argument("evaluate_independent_policy: wrong event count for user " + std::to_string(i));
        }
        for (const auto& dist : policy[i]) {
            double s = 0.0;
            for (double p : dist) {
                if (p < 0.0) throw std::invalid_argument("evaluate_independent_policy: negative probability");
                s += p;
            }
            if (dist.size() != static_cast<std::size_t>(spec.actions.size(i)) || std::abs(s - 1.0) > 1e-9) {
                throw std::invalid_argument("evaluate_independent_policy: conditional distribution not normalized");
            }
        }
    }

    const PenaltyTable table(spec);
    RVector r{std::vector<double>(spec.penalties.size(), 0.0)};
    std::vector<int> w(n_users);
    std::vector<int> a(n_users);
    for (std::size_t wf = 0; wf < spec.events.total(); ++wf) {
        const double pi = spec.distribution.probability_flat(spec.events, wf);
        if (pi == 0.0) continue;
        spec.events.decode(wf, w);
        for (std::size_t af = 0; af < spec.actions.total(); ++af) {
            spec.actions.decode(af, a);
            double pa = 1.0;
            for (std::size_t i = 0; i < n_users && pa != 0.0; ++i) pa *= policy[i][w[i]][a[i]];
            if (pa == 0.0) continue;
            for (std::size_t k = 0; k < r.values.size(); ++k) r.values[k] += pi * pa * table.at(wf, af, k);
        }
    }
    return r;
}

std::size_t sample_strategy(const CorrelatedPolicy& policy, Rng& rng) {
    if (policy.support.empty()) throw std::invalid_argument("sample_strategy: empty policy");
    double total = 0.0;
    for (const auto& e : policy.support) total += e.theta;
    const double u = rng.uniform() * total;
    double acc = 0.0;
    for (std::size_t m = 0; m < policy.support.size(); ++m) {
        acc += policy.support[m].theta;
        if (u < acc) return m;
    }
    return policy.support.size() - 1;
}

double brute_force_distributed_oracle(const std::vector<RVector>& r, const std::vector<double>& constraints) {
    const std::size_t M = r.size();
    const std::size_t K = constraints.size();
    if (M > 50) throw CapExceeded("brute_force_distributed_oracle strategies", M, 50);
    if (K > 2) throw CapExceeded("brute_force_distributed_oracle constraints", K, 2);

    double best = std::numeric_limits<double>::infinity();
    std::vector<double> theta;
    for (std::size_t s = 1; s <= std::min(K + 1, M); ++s) {
        for_each_subset(M, s, [&](const std::vector<std::size_t>& support) {
            for_each_subset(K, s - 1, [&](const std::vector<std::size_t>& tight) {
                std::vector<std::vector<double>> a(s, std::vector<double>(s));
                std::vector<double> b(s);
                for (std::size_t j = 0; j < s; ++j) a[0][j] = 1.0;
                b[0] = 1.0;
                for (std::size_t t = 0; t < tight.size(); ++t) {
                    for (std::size_t j = 0; j < s; ++j) a[t + 1][j] = r[support[j]][tight[t] + 1];
                    b[t + 1] = constraints[tight[t]];
                }
                if (!solve_square(a, b, theta)) return;
                for (double th : theta) {
                    if (th < -kFeasTol) return;
                }
                double obj = 0.0;
                for (std::size_t j = 0; j < s; ++j) obj += theta[j] * r[support[j]][0];
                for (std::size_t k = 0; k < K; ++k) {
                    double v = 0.0;
                    for (std::size_t j = 0; j < s; ++j) v += theta[j] * r[support[j]][k + 1];
                    if (v > constraints[k] + kFeasTol) return;
                }
                best = std::min(best, obj);
            });
        });
    }
    if (!std::isfinite(best)) throw Infeasible("brute_force_distributed_oracle: no feasible support");
    return best;
}

double brute_force_distributed_oracle(const ProblemSpec& spec, const std::vector<PureStrategy>& strategies) {
    std::vector<RVector> r;
    for (const auto& s : strategies) r.push_back(compute_r_vector(spec, s));
    return brute_force_distributed_oracle(r, spec.constraints);
}

}  // namespace corrsched
