#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "corrsched/problem.hpp"

namespace corrsched {

inline constexpr std::uint64_t kStrategyCap = 1'000'000;
inline constexpr std::uint64_t kPropertyCheckCap = 10'000'000;

/// Deterministic per-user maps g_i: event index -> action index.
struct PureStrategy {
    std::vector<std::vector<int>> maps;

    auto operator<=>(const PureStrategy&) const = default;

    int action(std::size_t user, int event) const { return maps[user][static_cast<std::size_t>(event)]; }
};

/// Expected penalties r_k, k = 0..K, of a pure strategy.
struct RVector {
    std::vector<double> values;

    double operator[](std::size_t k) const { return values[k]; }
    std::size_t size() const noexcept { return values.size(); }
};

enum class PruneMode { Auto, Off, Force };

/// Number of pure strategies prod_i |A_i|^|Omega_i| (saturating).
std::uint64_t count_all_strategies(const ProblemSpec& spec);

/// Every pure strategy in lexicographic order of the concatenated maps.
/// Throws CapExceeded when the count exceeds `cap`.
std::vector<PureStrategy> enumerate_all(const ProblemSpec& spec, std::uint64_t cap = kStrategyCap);

/// All non-decreasing maps from n_events events to n_actions actions, lexicographic.
std::vector<std::vector<int>> nondecreasing_maps(int n_events, int n_actions);

/// Cross product of per-user non-decreasing maps, lexicographic. For binary
/// actions these are the |Omega_i| + 1 threshold maps of each user.
std::vector<PureStrategy> enumerate_nondecreasing(const ProblemSpec& spec,
                                                  std::uint64_t cap = kStrategyCap);

/// Threshold h such that g(w) = [w >= h], or nullopt when the map is not of that form.
std::optional<int> threshold_of(std::span<const int> map);

/// Exhaustive test of the preferred action property for penalty k.
bool check_preferred_action(const ProblemSpec& spec, std::size_t k,
                            std::uint64_t cap = kPropertyCheckCap);

/// Product-mode events and the preferred action property on every penalty.
bool prune_applicable(const ProblemSpec& spec, std::uint64_t cap = kPropertyCheckCap);

/// Removes strategies rejected by the spec's fixture filter, keeping order.
std::vector<PureStrategy> apply_strategy_filter(const ProblemSpec& spec,
                                                std::vector<PureStrategy> strategies);

/// The strategy set the solvers and controllers work with: full or pruned
/// enumeration according to `mode`, followed by the fixture filter.
/// Force prunes even when prune_applicable() is false.
std::vector<PureStrategy> candidate_strategies(const ProblemSpec& spec, PruneMode mode,
                                               std::uint64_t cap = kStrategyCap);

RVector compute_r_vector(const ProblemSpec& spec, const PureStrategy& s);
RVector compute_r_vector(const ProblemSpec& spec, const PenaltyTable& table, const PureStrategy& s);

/// Position of the strategy in enumerate_all order; nullopt if it overflows.
std::optional<std::uint64_t> strategy_rank(const ProblemSpec& spec, const PureStrategy& s);

/// Strategies laid out for per-slot use: the joint action index of strategy m
/// under event vector omega is the sum of per-user precomputed contributions.
class StrategySet {
public:
    StrategySet(const ProblemSpec& spec, std::vector<PureStrategy> strategies);

    std::size_t size() const noexcept { return strategies_.size(); }
    const PureStrategy& operator[](std::size_t m) const { return strategies_[m]; }
    const std::vector<PureStrategy>& strategies() const noexcept { return strategies_; }

    std::size_t action_index(std::size_t m, std::span<const int> omega) const {
        const std::size_t* row = contrib_.data() + m * row_width_;
        std::size_t flat = 0;
        for (std::size_t i = 0; i < offsets_.size(); ++i) flat += row[offsets_[i] + static_cast<std::size_t>(omega[i])];
        return flat;
    }

private:
    std::vector<PureStrategy> strategies_;
    std::vector<std::size_t> offsets_;
    std::size_t row_width_ = 0;
    std::vector<std::size_t> contrib_;
};

/// r-vectors of every strategy in the set, computed exactly.
std::vector<RVector> compute_r_vectors(const ProblemSpec& spec, const StrategySet& set);

}  // namespace corrsched
