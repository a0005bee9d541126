#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "corrsched/penalty.hpp"
#include "corrsched/problem.hpp"
#include "corrsched/strategy.hpp"

namespace corrsched {

/// Componentwise Q_k <- max[Q_k + p_k - c_k, 0].
void queue_update(std::span<double> q, std::span<const double> delayed_penalties,
                  std::span<const double> constraints);

/// Virtual queues plus the D-slot feedback pipeline. Q(0) = 0 and the
/// penalties of slots before 0 count as zero.
class QueueState {
public:
    QueueState(std::size_t num_constraints, std::size_t delay);

    const std::vector<double>& q() const noexcept { return q_; }
    std::size_t t() const noexcept { return t_; }
    std::size_t delay() const noexcept { return delay_; }

    /// Records p(t), applies p(t - D) to the queues and moves to slot t + 1.
    /// Returns the delayed vector that was applied.
    std::span<const double> advance(std::span<const double> penalties_now,
                                    std::span<const double> constraints);

private:
    std::size_t delay_;
    std::size_t t_ = 0;
    std::vector<double> q_;
    std::vector<double> buffer_;  // ring of D vectors, oldest at head_
    std::vector<double> applied_;
    std::size_t head_ = 0;
};

enum class DppMode { Exact, Approximate, Separable };

struct DppConfig {
    double V = 1.0;
    std::size_t D = 0;
    DppMode mode = DppMode::Exact;
    std::size_t W = 40;  ///< window length, Approximate mode only
};

DppMode parse_dpp_mode(const std::string& text);
std::string to_string(DppMode mode);

/// argmin_m V r_0^(m) + sum_k Q_k r_k^(m); the lowest index wins ties.
std::size_t dpp_select(const std::vector<RVector>& r, std::span<const double> q, double V);

/// Same rule over a row-major M x (K + 1) array.
std::size_t dpp_select(const double* r, std::size_t count, std::size_t width, std::span<const double> q,
                       double V);

/// Window average of delayed event samples for every strategy.
///
/// Keeps running sums of p_k(g^(m)(w), w) over the last W pushed samples, so
/// a push costs O(M (K + 1)). Sums are rebuilt from scratch periodically to
/// stop rounding drift. The referenced problem data must outlive it.
class RollingEstimator {
public:
    RollingEstimator(const ProblemSpec& spec, const PenaltyTable& table, const StrategySet& strategies,
                     std::size_t window);

    void push(std::span<const int> omega);

    std::size_t window() const noexcept { return window_; }
    std::size_t count() const noexcept { return count_; }

    /// r~_k^(m); only meaningful once count() > 0.
    double estimate(std::size_t m, std::size_t k) const { return sums_[m * width_ + k] / static_cast<double>(count_); }

    /// Strategy chosen with the estimates in place of r. With no samples all
    /// scores are equal and index 0 is returned.
    std::size_t select(std::span<const double> q, double V) const;

private:
    void add(std::size_t slot, double sign);
    void rebuild();

    const ProblemSpec* spec_;
    const PenaltyTable* table_;
    const StrategySet* strategies_;
    std::size_t window_;
    std::size_t width_;
    std::vector<int> ring_;  // window_ x N event vectors
    std::vector<std::size_t> ring_flat_;
    std::size_t next_ = 0;
    std::size_t count_ = 0;
    std::size_t pushes_since_rebuild_ = 0;
    std::vector<double> sums_;
    std::vector<double> scratch_;
};

/// Per-user tables of every penalty for the separable fast path.
class SeparableModel {
public:
    /// Throws NotSeparable when some penalty is not a per-user sum.
    explicit SeparableModel(const ProblemSpec& spec);

    std::size_t users() const noexcept { return n_users_; }

    /// Each user's argmin over its own actions of V p_i0 + sum_k Q_k p_ik.
    std::vector<int> select(std::span<const double> q, double V, std::span<const int> omega) const;
    int select_user(std::size_t user, std::span<const double> q, double V, int omega_i) const;

private:
    std::size_t n_users_;
    std::vector<UserTables> tables_;  // per penalty
};

std::vector<int> separable_select(const ProblemSpec& spec, std::span<const double> q, double V,
                                  std::span<const int> omega);

/// max_m (1/2) sum_k sum_w pi(w) (p_k(g^(m)(w), w) - c_k)^2.
double compute_B(const ProblemSpec& spec, const std::vector<PureStrategy>& strategies);

/// Largest and smallest value of p_k over reachable events and all actions.
std::pair<double, double> penalty_range(const ProblemSpec& spec, std::size_t k);

/// Conservative F: max_m |reference - r_0^(m)| plus the range of p_0.
double compute_F(const ProblemSpec& spec, const std::vector<RVector>& r, double reference);

/// Bound on the one-slot change of ||Q||: the norm of max |p_k - c_k| per constraint.
double compute_delta_max(const ProblemSpec& spec);

/// p0_opt + B(1 + 2D)/V + L_D/(V t). Throws std::invalid_argument for V <= 0 or t == 0.
double performance_bound(double B, std::size_t D, double V, double t, double L_D, double p0_opt);

/// O(log t) bound on E||Q(t)|| under a Slater slack eps.
double slater_queue_bound(double A, double eps, double delta_max, double t);
double slater_rate(double eps, double delta_max);

/// sqrt(2 (C + F V) / t).
double mean_rate_envelope(double C, double F, double V, double t);

}  // namespace corrsched
