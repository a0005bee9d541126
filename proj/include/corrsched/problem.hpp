#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "corrsched/distribution.hpp"
#include "corrsched/index_space.hpp"
#include "corrsched/penalty.hpp"
#include "corrsched/rng.hpp"

namespace corrsched {

/// Fixture-level removal of per-user maps that are useless by inspection.
enum class StrategyFilter {
    None,
    /// Drop per-user maps with g_i(0) != 0 (never act on the null event).
    IdleOnZeroEvent,
};

/// A multi-user problem instance.
///
/// penalties[0] is the objective (negated utility); penalties[k] for k >= 1
/// is constrained by constraints[k - 1] on its time average.
struct ProblemSpec {
    IndexSpace actions;
    IndexSpace events;
    EventDistribution distribution;
    std::vector<PenaltyFn> penalties;
    std::vector<double> constraints;
    StrategyFilter strategy_filter = StrategyFilter::None;

    ProblemSpec() = default;
    ProblemSpec(std::vector<int> action_sizes, std::vector<int> event_sizes,
                EventDistribution dist, std::vector<PenaltyFn> penalties,
                std::vector<double> constraints);

    std::size_t users() const noexcept { return actions.dims(); }
    /// Number of constrained penalties K.
    std::size_t num_constraints() const noexcept { return constraints.size(); }
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const noexcept { return violations.empty(); }
};

ValidationReport validate_spec(const ProblemSpec& spec);

/// p_k(alpha, omega); k = 0 is the negated utility. Throws std::out_of_range.
double eval_penalty(const ProblemSpec& spec, std::size_t k, std::span<const int> alpha,
                    std::span<const int> omega);

double event_probability(const ProblemSpec& spec, std::span<const int> omega);

std::vector<int> sample_event(const ProblemSpec& spec, Rng& rng);

/// All K + 1 penalties tabulated over (omega, alpha) for fast lookup.
///
/// Layout: values[(omega_flat * |A| + alpha_flat) * (K + 1) + k]. When the
/// table would exceed `max_entries` the object falls back to direct
/// evaluation, so callers never need to care which path is active.
class PenaltyTable {
public:
    static constexpr std::size_t kDefaultMaxEntries = std::size_t{1} << 24;

    explicit PenaltyTable(const ProblemSpec& spec, std::size_t max_entries = kDefaultMaxEntries);

    std::size_t width() const noexcept { return width_; }
    bool tabulated() const noexcept { return !values_.empty(); }

    /// Writes all K + 1 penalties into out.
    void penalties(std::size_t omega_flat, std::size_t alpha_flat, std::span<double> out) const;

    double at(std::size_t omega_flat, std::size_t alpha_flat, std::size_t k) const {
        if (!values_.empty()) return values_[(omega_flat * n_actions_ + alpha_flat) * width_ + k];
        return direct(omega_flat, alpha_flat, k);
    }

    /// Pointer to the K + 1 contiguous entries; only valid when tabulated().
    const double* row(std::size_t omega_flat, std::size_t alpha_flat) const {
        return values_.data() + (omega_flat * n_actions_ + alpha_flat) * width_;
    }

private:
    double direct(std::size_t omega_flat, std::size_t alpha_flat, std::size_t k) const;

    const ProblemSpec* spec_;
    std::size_t width_;
    std::size_t n_actions_;
    std::vector<double> values_;
};

}  // namespace corrsched
