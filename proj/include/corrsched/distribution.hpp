#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "corrsched/index_space.hpp"
#include "corrsched/rng.hpp"

namespace corrsched {

/// Probability law of the event vector: a joint table or a product of marginals.
class EventDistribution {
public:
    enum class Mode { Joint, Product };

    /// Joint table indexed by the flat event index (user 0 most significant).
    static EventDistribution joint(std::vector<double> table);
    static EventDistribution product(std::vector<std::vector<double>> marginals);

    Mode mode() const noexcept { return mode_; }
    const std::vector<double>& joint_table() const noexcept { return joint_; }
    const std::vector<std::vector<double>>& marginals() const noexcept { return marginals_; }

    double probability(const IndexSpace& events, std::span<const int> omega) const;
    double probability_flat(const IndexSpace& events, std::size_t flat) const;

    /// Draws an event vector into `omega` and returns its flat index.
    std::size_t sample(const IndexSpace& events, Rng& rng, std::span<int> omega) const;

    /// Expands a product law into the equivalent joint table.
    EventDistribution as_joint(const IndexSpace& events) const;

    /// Problems with this distribution against the event space; empty when valid.
    std::vector<std::string> violations(const IndexSpace& events) const;

private:
    void build_cdfs();

    Mode mode_ = Mode::Joint;
    std::vector<double> joint_;
    std::vector<std::vector<double>> marginals_;
    std::vector<double> joint_cdf_;
    std::vector<std::vector<double>> marginal_cdfs_;
};

}  // namespace corrsched
