#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "corrsched/optimizer.hpp"
#include "corrsched/problem.hpp"
#include "corrsched/spec_io.hpp"
#include "corrsched/strategy.hpp"

namespace testutil {

inline std::string fixture(const std::string& name) { return std::string(CORRSCHED_FIXTURE_DIR) + "/" + name; }

inline corrsched::ProblemSpec two_sensor() { return corrsched::load_spec(fixture("two_sensor.json")); }
inline corrsched::ProblemSpec three_sensor() { return corrsched::load_spec(fixture("three_sensor.json")); }

inline std::vector<double> random_simplex(std::mt19937_64& gen, std::size_t n, bool allow_zero = false) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> p(n);
    double s = 0.0;
    for (auto& v : p) {
        v = (allow_zero && u(gen) < 0.2) ? 0.0 : 0.05 + u(gen);
        s += v;
    }
    if (s == 0.0) {
        p[0] = 1.0;
        return p;
    }
    for (auto& v : p) v /= s;
    return p;
}

inline corrsched::FullTable random_table(std::mt19937_64& gen, const corrsched::IndexSpace& a,
                                         const corrsched::IndexSpace& w, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    corrsched::FullTable t{a, w, std::vector<double>(a.total() * w.total())};
    for (auto& v : t.values) v = u(gen);
    return t;
}

/// Random spec with full-table penalties and constraints that some pure strategy meets.
inline corrsched::ProblemSpec random_spec(std::mt19937_64& gen, std::size_t max_users, int max_size,
                                          std::size_t max_k, bool product,
                                          std::uint64_t max_strategies = 1'000'000) {
    std::uniform_int_distribution<std::size_t> nu(1, max_users);
    std::uniform_int_distribution<int> sz(1, max_size);
    std::uniform_int_distribution<std::size_t> nk(0, max_k);
    const std::size_t n = nu(gen);
    std::vector<int> as(n), es(n);
    double count = 0.0;
    do {
        count = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            as[i] = std::max(2, sz(gen));
            es[i] = sz(gen);
            count *= std::pow(as[i], es[i]);
        }
    } while (count > static_cast<double>(max_strategies));
    const corrsched::IndexSpace A(as), W(es);
    corrsched::EventDistribution dist;
    if (product) {
        std::vector<std::vector<double>> m;
        for (int e : es) m.push_back(random_simplex(gen, static_cast<std::size_t>(e)));
        dist = corrsched::EventDistribution::product(m);
    } else {
        dist = corrsched::EventDistribution::joint(random_simplex(gen, W.total(), true));
    }
    const std::size_t K = nk(gen);
    std::vector<corrsched::PenaltyFn> pens;
    pens.emplace_back(random_table(gen, A, W, -1.0, 1.0));
    for (std::size_t k = 0; k < K; ++k) pens.emplace_back(random_table(gen, A, W, 0.0, 1.0));
    corrsched::ProblemSpec spec(as, es, dist, pens, std::vector<double>(K, 0.0));
    // Constraints: r of a random pure strategy plus a random margin.
    const auto all = corrsched::enumerate_all(spec);
    std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
    std::uniform_real_distribution<double> slack(0.0, 0.3);
    const auto r = corrsched::compute_r_vector(spec, all[pick(gen)]);
    for (std::size_t k = 0; k < K; ++k) spec.constraints[k] = r[k + 1] + slack(gen);
    return spec;
}

}  // namespace testutil
