#include <doctest.h>

#include <cmath>
#include <random>

#include "corrsched/errors.hpp"
#include "corrsched/optimizer.hpp"
#include "helpers.hpp"

using namespace corrsched;

namespace {

IndependentPolicy report_probabilities(double q1, double q2) {
    return {{{1.0, 0.0}, {1.0 - q1, q1}}, {{1.0, 0.0}, {1.0 - q2, q2}}};
}

}  // namespace

TEST_CASE("sensor example: correlated LP optimum") {
    const ProblemSpec spec = testutil::two_sensor();
    const auto c = candidate_strategies(spec, PruneMode::Auto);
    const CorrelatedPolicy p = solve_distributed_lp(spec, c);
    CHECK(p.utility() == doctest::Approx(23.0 / 48.0).epsilon(1e-12));
    CHECK(p.support.size() <= 3);
    double total = 0.0;
    for (const auto& e : p.support) {
        CHECK(e.theta > 0.0);
        total += e.theta;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t k = 0; k < 2; ++k) CHECK(p.achieved[k] <= 1.0 / 3.0 + 1e-9);
    // The published weights (1/3, 5/9, 1/9) on strategies 1, 2, 3 are feasible and optimal.
    const double theta[4] = {0.0, 5.0 / 9.0, 1.0 / 3.0, 1.0 / 9.0};
    std::vector<double> mix(3, 0.0);
    for (std::size_t m = 0; m < 4; ++m) {
        const auto r = compute_r_vector(spec, c[m]);
        for (std::size_t k = 0; k < 3; ++k) mix[k] += theta[m] * r[k];
    }
    CHECK(-mix[0] == doctest::Approx(23.0 / 48.0).epsilon(1e-12));
    CHECK(mix[1] <= 1.0 / 3.0 + 1e-12);
    CHECK(mix[2] <= 1.0 / 3.0 + 1e-12);

    CHECK(brute_force_distributed_oracle(spec, c) == doctest::Approx(-23.0 / 48.0).epsilon(1e-12));
    // Same optimum over all 16 unfiltered strategies.
    ProblemSpec unfiltered = spec;
    unfiltered.strategy_filter = StrategyFilter::None;
    CHECK(solve_distributed_lp(unfiltered, enumerate_all(unfiltered)).utility() ==
          doctest::Approx(23.0 / 48.0).epsilon(1e-12));
}

TEST_CASE("without constraints the best single strategy is optimal") {
    ProblemSpec spec = testutil::two_sensor();
    spec.penalties.resize(1);
    spec.constraints.clear();
    const auto c = candidate_strategies(spec, PruneMode::Auto);
    const auto p = solve_distributed_lp(spec, c);
    CHECK(p.support.size() == 1);
    CHECK(p.utility() == doctest::Approx(13.0 / 16.0));
    CHECK(brute_force_distributed_oracle(spec, c) == doctest::Approx(-13.0 / 16.0));
}

TEST_CASE("infeasible constraints throw") {
    ProblemSpec spec = testutil::two_sensor();
    spec.constraints = {-0.1, 1.0};
    CHECK_THROWS_AS(solve_distributed_lp(spec, candidate_strategies(spec, PruneMode::Auto)), Infeasible);
    CHECK_THROWS_AS(solve_centralized_lp(spec), Infeasible);
    CHECK_THROWS_AS(brute_force_distributed_oracle(spec, candidate_strategies(spec, PruneMode::Auto)), Infeasible);
}

TEST_CASE("sensor example: centralized optimum") {
    const ProblemSpec spec = testutil::two_sensor();
    const auto c = solve_centralized_lp(spec);
    CHECK(c.utility() == doctest::Approx(0.5).epsilon(1e-12));
    for (double a : c.achieved) CHECK(a <= 1.0 / 3.0 + 1e-9);
    for (const auto& row : c.conditional) {
        double s = 0.0;
        for (double v : row) {
            CHECK(v >= -1e-12);
            s += v;
        }
        CHECK(s == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS(solve_centralized_lp(testutil::three_sensor(), 1000), CapExceeded);
}

TEST_CASE("centralized policy with a dominant action is deterministic") {
    const IndexSpace A({3}), W({2});
    // Action 2 is best in every event.
    FullTable t{A, W, {0.0, -0.5, -1.0, 0.2, 0.1, -0.3}};
    const ProblemSpec spec({3}, {2}, EventDistribution::joint({0.4, 0.6}), {PenaltyFn(t)}, {});
    const auto c = solve_centralized_lp(spec);
    CHECK(c.objective == doctest::Approx(0.4 * -1.0 + 0.6 * -0.3));
    CHECK(c.conditional[0][2] == doctest::Approx(1.0));
    CHECK(c.conditional[1][2] == doctest::Approx(1.0));
}

TEST_CASE("independent reporting baseline") {
    const ProblemSpec spec = testutil::two_sensor();
    const RVector r = evaluate_independent_policy(spec, report_probabilities(4.0 / 9.0, 2.0 / 3.0));
    CHECK(-r[0] == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
    CHECK(std::abs(r[1] - 1.0 / 3.0) <= 1e-12);
    CHECK(std::abs(r[2] - 1.0 / 3.0) <= 1e-12);

    const RVector zero = evaluate_independent_policy(spec, report_probabilities(0, 0));
    for (double v : zero.values) CHECK(v == 0.0);

    const RVector one = evaluate_independent_policy(spec, report_probabilities(1, 1));
    CHECK(-one[0] == doctest::Approx(13.0 / 16.0));
    CHECK(one[1] == doctest::Approx(0.75));
    CHECK(one[2] == doctest::Approx(0.5));

    // Closed form from the reporting-probability analysis.
    for (double q1 : {0.1, 0.3, 0.7}) {
        for (double q2 : {0.2, 0.9}) {
            const double u = 0.375 * q1 + 0.0625 * q2 + 0.375 * (q1 + (1 - q1) * q2 / 2);
            CHECK(-evaluate_independent_policy(spec, report_probabilities(q1, q2))[0] == doctest::Approx(u));
        }
    }
    CHECK_THROWS_AS(evaluate_independent_policy(spec, report_probabilities(1.5, 0)), std::invalid_argument);
}

TEST_CASE("pure strategies evaluate identically as independent policies") {
    std::mt19937_64 gen(9);
    for (int trial = 0; trial < 20; ++trial) {
        const ProblemSpec spec = testutil::random_spec(gen, 2, 3, 2, false);
        const auto all = enumerate_all(spec);
        const auto& s = all[gen() % all.size()];
        IndependentPolicy pol(spec.users());
        for (std::size_t i = 0; i < spec.users(); ++i) {
            for (int a : s.maps[i]) {
                std::vector<double> d(static_cast<std::size_t>(spec.actions.size(i)), 0.0);
                d[static_cast<std::size_t>(a)] = 1.0;
                pol[i].push_back(d);
            }
        }
        const auto ri = evaluate_independent_policy(spec, pol);
        const auto rp = compute_r_vector(spec, s);
        for (std::size_t k = 0; k < ri.size(); ++k) CHECK(ri[k] == doctest::Approx(rp[k]).epsilon(1e-12));
    }
}

TEST_CASE("LP agrees with the brute-force oracle and keeps at most K+1 strategies") {
    std::mt19937_64 gen(77);
    for (int trial = 0; trial < 60; ++trial) {
        const ProblemSpec spec = testutil::random_spec(gen, 2, 3, 2, trial % 2 == 1, 50);
        const auto all = enumerate_all(spec);
        const auto p = solve_distributed_lp(spec, all);
        CHECK(p.support.size() <= spec.num_constraints() + 1);
        CHECK(p.objective == doctest::Approx(brute_force_distributed_oracle(spec, all)).epsilon(1e-9));
        for (std::size_t k = 0; k < spec.num_constraints(); ++k) CHECK(p.achieved[k] <= spec.constraints[k] + 1e-9);
        // Centralized control can only do better.
        CHECK(solve_centralized_lp(spec).objective <= p.objective + 1e-9);
    }
}

TEST_CASE("oracle caps") {
    std::vector<RVector> r(51, RVector{{0.0, 0.0}});
    CHECK_THROWS_AS(brute_force_distributed_oracle(r, {1.0}), CapExceeded);
    std::vector<RVector> r3(3, RVector{{0.0, 0.0, 0.0, 0.0}});
    CHECK_THROWS_AS(brute_force_distributed_oracle(r3, {1.0, 1.0, 1.0}), CapExceeded);
    std::vector<RVector> r0{RVector{{0.3}}, RVector{{-0.2}}, RVector{{0.1}}};
    CHECK(brute_force_distributed_oracle(r0, {}) == doctest::Approx(-0.2));
}

TEST_CASE("single-user problems have no information gap") {
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 20; ++trial) {
        const ProblemSpec spec = testutil::random_spec(gen, 1, 3, 2, true);
        const double d = solve_distributed_lp(spec, enumerate_all(spec)).objective;
        CHECK(solve_centralized_lp(spec).objective == doctest::Approx(d).epsilon(1e-9));
    }
}

TEST_CASE("sampling the optimal policy reproduces its weights") {
    const ProblemSpec spec = testutil::two_sensor();
    const auto p = solve_distributed_lp(spec, candidate_strategies(spec, PruneMode::Auto));
    Rng a(42), b(42);
    const int n = 1000000;
    std::vector<int> counts(p.support.size(), 0);
    bool same = true;
    for (int i = 0; i < n; ++i) {
        const auto m = sample_strategy(p, a);
        same = same && m == sample_strategy(p, b);
        ++counts[m];
    }
    CHECK(same);
    for (std::size_t m = 0; m < p.support.size(); ++m) {
        const double th = p.support[m].theta;
        CHECK(std::abs(counts[m] - n * th) <= 4 * std::sqrt(n * th * (1 - th)));
    }
    CorrelatedPolicy single;
    single.support.push_back({0, {}, 1.0, {}});
    Rng c(1);
    for (int i = 0; i < 100; ++i) CHECK(sample_strategy(single, c) == 0);
}
