#include "corrsched/strategy.hpp"

#include <algorithm>
#include <limits>
#include <cmath>

#include "corrsched/errors.hpp"

namespace corrsched {

namespace {

std::vector<std::vector<int>> all_maps(int n_events, int n_actions) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(n_events), 0);
    while (true) {
        out.push_back(cur);
        int pos = n_events - 1;
        while (pos >= 0 && cur[static_cast<std::size_t>(pos)] == n_actions - 1) {
            cur[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
        ++cur[static_cast<std::size_t>(pos)];
    }
    return out;
}

void extend_nondecreasing(std::vector<int>& cur, std::size_t pos, int floor, int n_actions,
                          std::vector<std::vector<int>>& out) {
    if (pos == cur.size()) {
        out.push_back(cur);
        return;
    }
    for (int a = floor; a < n_actions; ++a) {
        cur[pos] = a;
        extend_nondecreasing(cur, pos + 1, a, n_actions, out);
    }
}

std::vector<PureStrategy> cross_product(const std::vector<std::vector<std::vector<int>>>& per_user,
                                        std::uint64_t cap, const char* what) {
    std::uint64_t count = 1;
    for (const auto& u : per_user) count = saturating_mul(count, u.size());
    if (count > cap) throw CapExceeded(what, count, cap);

    std::vector<PureStrategy> out;
    out.reserve(static_cast<std::size_t>(count));
    if (count == 0) return out;
    std::vector<std::size_t> idx(per_user.size(), 0);
    while (true) {
        PureStrategy s;
        s.maps.reserve(per_user.size());
        for (std::size_t i = 0; i < per_user.size(); ++i) s.maps.push_back(per_user[i][idx[i]]);
        out.push_back(std::move(s));
        std::size_t pos = per_user.size();
        while (pos > 0 && idx[pos - 1] + 1 == per_user[pos - 1].size()) {
            idx[pos - 1] = 0;
            --pos;
        }
        if (pos == 0) break;
        ++idx[pos - 1];
    }
    return out;
}

}  // namespace

std::uint64_t count_all_strategies(const ProblemSpec& spec) {
    std::uint64_t m = 1;
    for (std::size_t i = 0; i < spec.users(); ++i) {
        for (int w = 0; w < spec.events.size(i); ++w) {
            m = saturating_mul(m, static_cast<std::uint64_t>(spec.actions.size(i)));
        }
    }
    return m;
}

std::vector<PureStrategy> enumerate_all(const ProblemSpec& spec, std::uint64_t cap) {
    const std::uint64_t m = count_all_strategies(spec);
    if (m > cap) throw CapExceeded("enumerate_all (use pruned enumeration)", m, cap);
    std::vector<std::vector<std::vector<int>>> per_user;
    for (std::size_t i = 0; i < spec.users(); ++i) {
        per_user.push_back(all_maps(spec.events.size(i), spec.actions.size(i)));
    }
    return cross_product(per_user, cap, "enumerate_all");
}

std::vector<std::vector<int>> nondecreasing_maps(int n_events, int n_actions) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(n_events));
    extend_nondecreasing(cur, 0, 0, n_actions, out);
    return out;
}

std::vector<PureStrategy> enumerate_nondecreasing(const ProblemSpec& spec, std::uint64_t cap) {
    std::vector<std::vector<std::vector<int>>> per_user;
    for (std::size_t i = 0; i < spec.users(); ++i) {
        per_user.push_back(nondecreasing_maps(spec.events.size(i), spec.actions.size(i)));
    }
    return cross_product(per_user, cap, "enumerate_nondecreasing");
}

std::optional<int> threshold_of(std::span<const int> map) {
    int h = static_cast<int>(map.size());
    for (std::size_t w = 0; w < map.size(); ++w) {
        if (map[w] != 0 && map[w] != 1) return std::nullopt;
        if (map[w] == 1 && h == static_cast<int>(map.size())) h = static_cast<int>(w);
        if (map[w] == 0 && h != static_cast<int>(map.size())) return std::nullopt;
    }
    return h;
}

bool check_preferred_action(const ProblemSpec& spec, std::size_t k, std::uint64_t cap) {
    if (k >= spec.penalties.size()) throw std::out_of_range("check_preferred_action: penalty index out of range");
    const auto& actions = spec.actions;
    const auto& events = spec.events;
    std::uint64_t work = 0;
    for (std::size_t i = 0; i < spec.users(); ++i) {
        const std::uint64_t na = static_cast<std::uint64_t>(actions.size(i));
        const std::uint64_t ne = static_cast<std::uint64_t>(events.size(i));
        const std::uint64_t others = saturating_mul(actions.total() / na, events.total() / ne);
        work += saturating_mul(saturating_mul(others, na * (na - 1) / 2), 4 * (ne * (ne - 1) / 2));
    }
    const std::uint64_t table_size = saturating_mul(actions.total(), events.total());
    if (work > cap || table_size > cap) throw CapExceeded("check_preferred_action", std::max(work, table_size), cap);

    const FullTable t = expand_to_table(spec.penalties[k], actions, events);
    const std::size_t n_actions = actions.total();
    auto p = [&](std::size_t af, std::size_t wf) { return t.values[wf * n_actions + af]; };

    double scale = 0.0;
    for (double v : t.values) scale = std::max(scale, std::abs(v));
    const double tol = 1e-12 * std::max(1.0, scale);

    std::vector<int> coords(spec.users());
    for (std::size_t i = 0; i < spec.users(); ++i) {
        const std::size_t a_stride = actions.stride(i);
        const std::size_t w_stride = events.stride(i);
        for (std::size_t af = 0; af < actions.total(); ++af) {
            if ((af / a_stride) % static_cast<std::size_t>(actions.size(i)) != 0) continue;
            for (std::size_t wf = 0; wf < events.total(); ++wf) {
                if ((wf / w_stride) % static_cast<std::size_t>(events.size(i)) != 0) continue;
                for (int hi = 1; hi < actions.size(i); ++hi) {
                    for (int lo = 0; lo < hi; ++lo) {
                        const std::size_t a_hi = af + static_cast<std::size_t>(hi) * a_stride;
                        const std::size_t a_lo = af + static_cast<std::size_t>(lo) * a_stride;
                        for (int w = 0; w < events.size(i); ++w) {
                            for (int g = w + 1; g < events.size(i); ++g) {
                                const std::size_t w_lo = wf + static_cast<std::size_t>(w) * w_stride;
                                const std::size_t w_hi = wf + static_cast<std::size_t>(g) * w_stride;
                                const double left = p(a_hi, w_lo) - p(a_lo, w_lo);
                                const double right = p(a_hi, w_hi) - p(a_lo, w_hi);
                                if (left < right - tol) return false;
                            }
                        }
                    }
                }
            }
        }
    }
    return true;
}

bool prune_applicable(const ProblemSpec& spec, std::uint64_t cap) {
    if (spec.distribution.mode() != EventDistribution::Mode::Product) return false;
    for (std::size_t k = 0; k < spec.penalties.size(); ++k) {
        if (!check_preferred_action(spec, k, cap)) return false;
    }
    return true;
}

std::vector<PureStrategy> apply_strategy_filter(const ProblemSpec& spec, std::vector<PureStrategy> strategies) {
    if (spec.strategy_filter == StrategyFilter::None) return strategies;
    std::erase_if(strategies, [](const PureStrategy& s) {
        return std::any_of(s.maps.begin(), s.maps.end(), [](const std::vector<int>& g) { return g[0] != 0; });
    });
    return strategies;
}

std::vector<PureStrategy> candidate_strategies(const ProblemSpec& spec, PruneMode mode, std::uint64_t cap) {
    const bool prune = mode == PruneMode::Force || (mode == PruneMode::Auto && prune_applicable(spec));
    auto all = prune ? enumerate_nondecreasing(spec, cap) : enumerate_all(spec, cap);
    return apply_strategy_filter(spec, std::move(all));
}

RVector compute_r_vector(const ProblemSpec& spec, const PureStrategy& s) {
    RVector r{std::vector<double>(spec.penalties.size(), 0.0)};
    std::vector<int> w(spec.users());
    std::vector<int> a(spec.users());
    for (std::size_t wf = 0; wf < spec.events.total(); ++wf) {
        const double pi = spec.distribution.probability_flat(spec.events, wf);
        if (pi == 0.0) continue;
        spec.events.decode(wf, w);
        for (std::size_t i = 0; i < spec.users(); ++i) a[i] = s.action(i, w[i]);
        for (std::size_t k = 0; k < r.values.size(); ++k) r.values[k] += pi * spec.penalties[k].evaluate(a, w);
    }
    return r;
}

RVector compute_r_vector(const ProblemSpec& spec, const PenaltyTable& table, const PureStrategy& s) {
    RVector r{std::vector<double>(spec.penalties.size(), 0.0)};
    std::vector<int> w(spec.users());
    for (std::size_t wf = 0; wf < spec.events.total(); ++wf) {
        const double pi = spec.distribution.probability_flat(spec.events, wf);
        if (pi == 0.0) continue;
        spec.events.decode(wf, w);
        std::size_t af = 0;
        for (std::size_t i = 0; i < spec.users(); ++i) {
            af += static_cast<std::size_t>(s.action(i, w[i])) * spec.actions.stride(i);
        }
        for (std::size_t k = 0; k < r.values.size(); ++k) r.values[k] += pi * table.at(wf, af, k);
    }
    return r;
}

std::optional<std::uint64_t> strategy_rank(const ProblemSpec& spec, const PureStrategy& s) {
    if (count_all_strategies(spec) == std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
    std::uint64_t rank = 0;
    for (std::size_t i = 0; i < spec.users(); ++i) {
        for (int w = 0; w < spec.events.size(i); ++w) {
            rank = rank * static_cast<std::uint64_t>(spec.actions.size(i)) +
                   static_cast<std::uint64_t>(s.action(i, w));
        }
    }
    return rank;
}

StrategySet::StrategySet(const ProblemSpec& spec, std::vector<PureStrategy> strategies)
    : strategies_(std::move(strategies)) {
    for (std::size_t i = 0; i < spec.users(); ++i) {
        offsets_.push_back(row_width_);
        row_width_ += static_cast<std::size_t>(spec.events.size(i));
    }
    contrib_.resize(strategies_.size() * row_width_);
    for (std::size_t m = 0; m < strategies_.size(); ++m) {
        const auto& s = strategies_[m];
        if (s.maps.size() != spec.users()) throw std::invalid_argument("StrategySet: strategy has wrong user count");
        for (std::size_t i = 0; i < spec.users(); ++i) {
            if (s.maps[i].size() != static_cast<std::size_t>(spec.events.size(i))) {
                throw std::invalid_argument("StrategySet: map length does not match event space");
            }
            for (int w = 0; w < spec.events.size(i); ++w) {
                const int a = s.action(i, w);
                if (a < 0 || a >= spec.actions.size(i)) throw std::invalid_argument("StrategySet: action out of range");
                contrib_[m * row_width_ + offsets_[i] + static_cast<std::size_t>(w)] =
                    static_cast<std::size_t>(a) * spec.actions.stride(i);
            }
        }
    }
}

std::vector<RVector> compute_r_vectors(const ProblemSpec& spec, const StrategySet& set) {
    const PenaltyTable table(spec);
    std::vector<RVector> out;
    out.reserve(set.size());
    for (const auto& s : set.strategies()) out.push_back(compute_r_vector(spec, table, s));
    return out;
}

}  // namespace corrsched
