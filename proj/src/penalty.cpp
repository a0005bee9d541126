#include "corrsched/penalty.hpp"

#include <algorithm>
#include <cmath>

namespace corrsched {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool fits_events(const std::vector<std::vector<double>>& tables, const IndexSpace& events) {
    if (tables.size() != events.dims()) return false;
    for (std::size_t i = 0; i < tables.size(); ++i) {
        if (tables[i].size() != static_cast<std::size_t>(events.size(i))) return false;
    }
    return true;
}

UserTables zero_tables(const IndexSpace& actions, const IndexSpace& events) {
    UserTables t(actions.dims());
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i].assign(static_cast<std::size_t>(actions.size(i)),
                    std::vector<double>(static_cast<std::size_t>(events.size(i)), 0.0));
    }
    return t;
}

}  // namespace

std::string PenaltyFn::kind() const {
    return std::visit(overloaded{
                          [](const FullTable&) { return std::string("full_table"); },
                          [](const PowerPerUser&) { return std::string("power"); },
                          [](const MinSumUtilityNeg&) { return std::string("min_sum_utility_neg"); },
                          [](const CollisionUtilityNeg&) { return std::string("collision_utility_neg"); },
                          [](const WeightedSum&) { return std::string("weighted_sum"); },
                          [](const ProductForm&) { return std::string("product_form"); },
                          [](const SeparableSum&) { return std::string("separable_sum"); },
                      },
                      node_);
}

double PenaltyFn::evaluate(std::span<const int> alpha, std::span<const int> omega) const {
    return std::visit(
        overloaded{
            [&](const FullTable& t) {
                return t.values[t.events.encode(omega) * t.actions.total() + t.actions.encode(alpha)];
            },
            [&](const PowerPerUser& p) { return static_cast<double>(alpha[p.user]); },
            [&](const MinSumUtilityNeg& m) {
                double s = 0.0;
                for (std::size_t i = 0; i < m.weights.size(); ++i) {
                    s += m.weights[i][omega[i]] * alpha[i];
                }
                return -std::min(s, m.cap);
            },
            [&](const CollisionUtilityNeg&) {
                double u = 0.0;
                for (std::size_t i = 0; i < alpha.size(); ++i) {
                    double term = static_cast<double>(omega[i]) * alpha[i];
                    for (std::size_t j = 0; j < alpha.size(); ++j) {
                        if (j != i) term *= 1.0 - alpha[j];
                    }
                    u += term;
                }
                return -u;
            },
            [&](const WeightedSum& w) {
                double s = 0.0;
                for (std::size_t r = 0; r < w.children.size(); ++r) {
                    s += w.weights[r] * w.children[r].evaluate(alpha, omega);
                }
                return s;
            },
            [&](const ProductForm& p) {
                double v = 1.0;
                for (std::size_t i = 0; i < p.event_factors.size(); ++i) {
                    v *= p.event_factors[i][omega[i]] * p.action_factors[i][alpha[i]];
                }
                return v;
            },
            [&](const SeparableSum& s) {
                double v = 0.0;
                for (std::size_t i = 0; i < s.tables.size(); ++i) v += s.tables[i][alpha[i]][omega[i]];
                return v;
            },
        },
        node_);
}

std::optional<UserTables> PenaltyFn::decompose(const IndexSpace& actions,
                                               const IndexSpace& events) const {
    if (actions.dims() == 1) {
        UserTables t = zero_tables(actions, events);
        for (int a = 0; a < actions.size(0); ++a) {
            for (int w = 0; w < events.size(0); ++w) {
                const int av[1] = {a};
                const int wv[1] = {w};
                t[0][a][w] = evaluate(av, wv);
            }
        }
        return t;
    }
    return std::visit(
        overloaded{
            [&](const PowerPerUser& p) -> std::optional<UserTables> {
                UserTables t = zero_tables(actions, events);
                for (int a = 0; a < actions.size(p.user); ++a) {
                    std::fill(t[p.user][a].begin(), t[p.user][a].end(), static_cast<double>(a));
                }
                return t;
            },
            [&](const SeparableSum& s) -> std::optional<UserTables> { return s.tables; },
            [&](const WeightedSum& w) -> std::optional<UserTables> {
                UserTables acc = zero_tables(actions, events);
                for (std::size_t r = 0; r < w.children.size(); ++r) {
                    auto child = w.children[r].decompose(actions, events);
                    if (!child) return std::nullopt;
                    for (std::size_t i = 0; i < acc.size(); ++i) {
                        for (std::size_t a = 0; a < acc[i].size(); ++a) {
                            for (std::size_t e = 0; e < acc[i][a].size(); ++e) {
                                acc[i][a][e] += w.weights[r] * (*child)[i][a][e];
                            }
                        }
                    }
                }
                return acc;
            },
            [](const auto&) -> std::optional<UserTables> { return std::nullopt; },
        },
        node_);
}

std::vector<std::string> PenaltyFn::violations(const IndexSpace& actions,
                                               const IndexSpace& events) const {
    std::vector<std::string> out;
    std::visit(
        overloaded{
            [&](const FullTable& t) {
                if (t.actions.sizes() != actions.sizes() || t.events.sizes() != events.sizes() ||
                    t.values.size() != actions.total() * events.total()) {
                    out.push_back("full_table: size mismatch");
                }
            },
            [&](const PowerPerUser& p) {
                if (p.user < 0 || static_cast<std::size_t>(p.user) >= actions.dims()) {
                    out.push_back("power: user index out of range");
                }
            },
            [&](const MinSumUtilityNeg& m) {
                if (!fits_events(m.weights, events)) out.push_back("min_sum_utility_neg: weight table size mismatch");
            },
            [&](const CollisionUtilityNeg&) {},
            [&](const WeightedSum& w) {
                if (w.children.size() != w.weights.size()) {
                    out.push_back("weighted_sum: children/weights length mismatch");
                }
                for (double x : w.weights) {
                    if (!(x >= 0.0)) out.push_back("weighted_sum: negative weight");
                }
                for (const auto& c : w.children) {
                    for (auto& v : c.violations(actions, events)) out.push_back("weighted_sum/" + v);
                }
            },
            [&](const ProductForm& p) {
                if (!fits_events(p.event_factors, events)) out.push_back("product_form: event factor size mismatch");
                if (!fits_events(p.action_factors, actions)) out.push_back("product_form: action factor size mismatch");
            },
            [&](const SeparableSum& s) {
                bool ok = s.tables.size() == actions.dims();
                for (std::size_t i = 0; ok && i < s.tables.size(); ++i) {
                    ok = s.tables[i].size() == static_cast<std::size_t>(actions.size(i));
                    for (std::size_t a = 0; ok && a < s.tables[i].size(); ++a) {
                        ok = s.tables[i][a].size() == static_cast<std::size_t>(events.size(i));
                    }
                }
                if (!ok) out.push_back("separable_sum: table size mismatch");
            },
        },
        node_);
    return out;
}

FullTable expand_to_table(const PenaltyFn& fn, const IndexSpace& actions, const IndexSpace& events) {
    FullTable t{actions, events, std::vector<double>(actions.total() * events.total())};
    std::vector<int> a(actions.dims());
    std::vector<int> w(events.dims());
    for (std::size_t wf = 0; wf < events.total(); ++wf) {
        events.decode(wf, w);
        for (std::size_t af = 0; af < actions.total(); ++af) {
            actions.decode(af, a);
            t.values[wf * actions.total() + af] = fn.evaluate(a, w);
        }
    }
    return t;
}

}  // namespace corrsched
