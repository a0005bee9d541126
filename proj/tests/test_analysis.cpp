#include <doctest.h>

#include <cmath>
#include <random>

#include "corrsched/analysis.hpp"
#include "corrsched/online.hpp"
#include "helpers.hpp"

using namespace corrsched;

TEST_CASE("XOR counterexample values") {
    const auto res = verify_counterexample();
    CHECK(res.centralized == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.distributed == doctest::Approx(0.5).epsilon(1e-12));

    // Utility 1 exactly when (a1 == a2) xor (w1 = w2 = 1).
    const ProblemSpec spec = counterexample_spec();
    for (int w1 = 0; w1 < 2; ++w1) {
        for (int w2 = 0; w2 < 2; ++w2) {
            for (int a1 = 0; a1 < 2; ++a1) {
                for (int a2 = 0; a2 < 2; ++a2) {
                    const std::vector<int> a{a1, a2}, w{w1, w2};
                    const bool one = (a1 == a2) != (w1 == 1 && w2 == 1);
                    CHECK(-eval_penalty(spec, 0, a, w) == (one ? 1.0 : -1.0));
                }
            }
        }
    }
    // Both users always playing +1 attains the distributed optimum.
    const PureStrategy plus{{{1, 1}, {1, 1}}};
    CHECK(-compute_r_vector(spec, plus)[0] == doctest::Approx(0.5));
}

TEST_CASE("policy comparison on the sensor example") {
    const auto rep = compare_policies(testutil::two_sensor());
    CHECK(std::abs(rep.independent_best - 4.0 / 9.0) < 5e-6);
    CHECK(std::abs(rep.distributed_opt - 23.0 / 48.0) < 1e-9);
    CHECK(std::abs(rep.centralized_opt - 0.5) < 1e-9);
    CHECK(rep.strategy_count == 4);
    CHECK(rep.gap_centralized_distributed > 0.02);
}

TEST_CASE("separable problems have no centralization gap") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        UserTables t0(2), t1(2);
        for (std::size_t i = 0; i < 2; ++i) {
            t0[i].assign(2, std::vector<double>(3));
            t1[i].assign(2, std::vector<double>(3));
            for (int a = 0; a < 2; ++a) {
                for (int w = 0; w < 3; ++w) {
                    t0[i][a][w] = u(gen);
                    t1[i][a][w] = a == 0 ? 0.0 : std::abs(u(gen));
                }
            }
        }
        const ProblemSpec spec({2, 2}, {3, 3}, EventDistribution::product({{0.2, 0.3, 0.5}, {0.6, 0.3, 0.1}}),
                               {PenaltyFn(SeparableSum{t0}), PenaltyFn(SeparableSum{t1})}, {0.4});
        const auto rep = compare_policies(spec, PruneMode::Off);
        CHECK(rep.distributed_opt == doctest::Approx(rep.centralized_opt).epsilon(1e-9));
    }
}

TEST_CASE("comparison ordering on random small problems") {
    std::mt19937_64 gen(50);
    for (int trial = 0; trial < 50; ++trial) {
        const ProblemSpec spec = testutil::random_spec(gen, 2, 2, 2, trial % 2 == 0);
        const auto rep = compare_policies(spec, PruneMode::Off);
        CHECK(rep.centralized_opt >= rep.distributed_opt - 1e-9);
        if (!std::isnan(rep.independent_best)) CHECK(rep.distributed_opt >= rep.independent_best - 1e-9);
        if (spec.users() == 1) {
            CHECK(rep.distributed_opt == doctest::Approx(rep.centralized_opt).epsilon(1e-9));
        }
    }
}

TEST_CASE("largest Slater slack") {
    const ProblemSpec spec = testutil::two_sensor();
    const auto c = candidate_strategies(spec, PruneMode::Auto);
    const auto r = compute_r_vectors(spec, StrategySet(spec, c));
    // Never reporting leaves the full 1/3 of slack on both constraints.
    const double e = epsilon_max(r, spec.constraints);
    CHECK(e == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    CHECK(slack_feasible(r, spec.constraints, e - 1e-5));
    CHECK_FALSE(slack_feasible(r, spec.constraints, e + 1e-5));

    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 30; ++trial) {
        const ProblemSpec s = testutil::random_spec(gen, 2, 2, 2, false);
        if (s.num_constraints() == 0) {
            CHECK(std::isinf(epsilon_max(compute_r_vectors(s, StrategySet(s, enumerate_all(s))), s.constraints)));
            continue;
        }
        const auto rr = compute_r_vectors(s, StrategySet(s, enumerate_all(s)));
        const double em = epsilon_max(rr, s.constraints);
        CHECK(slack_feasible(rr, s.constraints, em - 1e-5));
        CHECK_FALSE(slack_feasible(rr, s.constraints, em + 1e-5));
    }
}

TEST_CASE("bound audit on an exact-controller trace") {
    const ProblemSpec spec = testutil::two_sensor();
    SimConfig cfg;
    cfg.dpp = {100.0, 0, DppMode::Exact, 40};
    cfg.horizon = 20000;
    cfg.seed = 3;
    cfg.trace_stride = 1;
    const auto res = run_episode(spec, cfg);
    const BoundReport rep = audit_bounds(res.trace, spec, cfg);
    CHECK(rep.performance_applicable);
    CHECK(rep.performance_checked == 20000);
    CHECK(rep.performance_violations == 0);
    CHECK(rep.identity_checked == 19999);
    CHECK(rep.identity_worst_residual <= 1e-9);
    CHECK(rep.p0_opt == doctest::Approx(-23.0 / 48.0));
    CHECK(rep.slater.applicable);
    CHECK(rep.ok());

    // Strided traces: the identity is only checked where the needed rows exist.
    cfg.dpp.D = 4;
    cfg.trace_stride = 5;
    const auto strided = run_episode(spec, cfg);
    const BoundReport rep2 = audit_bounds(strided.trace, spec, cfg);
    CHECK(rep2.identity_checked > 0);
    CHECK(rep2.identity_worst_residual <= 1e-9);
    CHECK_FALSE(rep2.slater.applicable);

    cfg.dpp.mode = DppMode::Approximate;
    CHECK_FALSE(audit_bounds(strided.trace, spec, cfg).performance_applicable);
}

TEST_CASE("ensemble queue norms stay below the Slater bound") {
    const ProblemSpec spec = testutil::two_sensor();
    SimConfig cfg;
    cfg.dpp = {20.0, 0, DppMode::Exact, 40};
    cfg.horizon = 5000;
    cfg.runs = 20;
    cfg.seed = 100;
    const Simulation sim(spec, cfg);
    const auto ens = sim.run_ensemble();
    const auto audit = audit_slater(spec, sim.strategies(), cfg.dpp.V, 0, ens.mean_q_norm);
    CHECK(audit.applicable);
    CHECK(audit.checked == 5000);
    CHECK(audit.violations == 0);
    CHECK(audit.A == doctest::Approx(audit.B + audit.F * 20.0));
    CHECK_FALSE(audit_slater(spec, sim.strategies(), cfg.dpp.V, 3, ens.mean_q_norm).applicable);
}
