#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "corrsched/index_space.hpp"

namespace corrsched {

class PenaltyFn;

/// Dense values over (omega, alpha): index omega_flat * |A| + alpha_flat.
struct FullTable {
    IndexSpace actions;
    IndexSpace events;
    std::vector<double> values;
};

/// alpha_i of a single user (a power cost of one unit per report).
struct PowerPerUser {
    int user = 0;
};

/// -min[sum_i phi_i(omega_i) alpha_i, cap].
struct MinSumUtilityNeg {
    double cap = 1.0;
    std::vector<std::vector<double>> weights;
};

/// -sum_i omega_i alpha_i prod_{j != i} (1 - alpha_j), the collision channel.
struct CollisionUtilityNeg {};

struct WeightedSum {
    std::vector<PenaltyFn> children;
    std::vector<double> weights;
};

/// prod_i phi_i(omega_i) psi_i(alpha_i).
struct ProductForm {
    std::vector<std::vector<double>> event_factors;
    std::vector<std::vector<double>> action_factors;
};

/// Per-user tables indexed [user][alpha_i][omega_i].
using UserTables = std::vector<std::vector<std::vector<double>>>;

/// sum_i tables[i][alpha_i][omega_i].
struct SeparableSum {
    UserTables tables;
};

/// A penalty function p(alpha, omega) over finite action and event spaces.
class PenaltyFn {
public:
    using Node = std::variant<FullTable, PowerPerUser, MinSumUtilityNeg, CollisionUtilityNeg,
                              WeightedSum, ProductForm, SeparableSum>;

    PenaltyFn() : node_(PowerPerUser{}) {}
    template <class T>
    PenaltyFn(T node) : node_(std::move(node)) {}

    const Node& node() const noexcept { return node_; }
    std::string kind() const;

    double evaluate(std::span<const int> alpha, std::span<const int> omega) const;

    /// Per-user tables when the function is a sum of single-user terms;
    /// nullopt otherwise. Single-user problems always decompose.
    std::optional<UserTables> decompose(const IndexSpace& actions, const IndexSpace& events) const;

    /// Structural problems given the problem's spaces; empty when consistent.
    std::vector<std::string> violations(const IndexSpace& actions,
                                        const IndexSpace& events) const;

private:
    Node node_;
};

/// Expands any penalty into its FullTable form.
FullTable expand_to_table(const PenaltyFn& fn, const IndexSpace& actions, const IndexSpace& events);

}  // namespace corrsched
