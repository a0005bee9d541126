#include "corrsched/online.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "corrsched/errors.hpp"

namespace corrsched {

void queue_update(std::span<double> q, std::span<const double> delayed_penalties,
                  std::span<const double> constraints) {
    if (q.size() != delayed_penalties.size() || q.size() != constraints.size()) {
        throw std::invalid_argument("queue_update: dimension mismatch");
    }
    for (std::size_t k = 0; k < q.size(); ++k) q[k] = std::max(q[k] + delayed_penalties[k] - constraints[k], 0.0);
}

QueueState::QueueState(std::size_t num_constraints, std::size_t delay)
    : delay_(delay), q_(num_constraints, 0.0), buffer_(num_constraints * delay, 0.0), applied_(num_constraints, 0.0) {}

std::span<const double> QueueState::advance(std::span<const double> penalties_now,
                                            std::span<const double> constraints) {
    const std::size_t K = q_.size();
    if (penalties_now.size() != K) throw std::invalid_argument("QueueState::advance: dimension mismatch");
    if (delay_ == 0) {
        std::copy(penalties_now.begin(), penalties_now.end(), applied_.begin());
    } else {
        double* slot = buffer_.data() + head_ * K;
        std::copy(slot, slot + K, applied_.begin());
        std::copy(penalties_now.begin(), penalties_now.end(), slot);
        head_ = (head_ + 1) % delay_;
    }
    queue_update(q_, applied_, constraints);
    ++t_;
    return applied_;
}

DppMode parse_dpp_mode(const std::string& text) {
    if (text == "exact") return DppMode::Exact;
    if (text == "approx" || text == "approximate") return DppMode::Approximate;
    if (text == "separable") return DppMode::Separable;
    throw std::invalid_argument("unknown controller mode '" + text + "'");
}

std::string to_string(DppMode mode) {
    switch (mode) {
        case DppMode::Exact: return "exact";
        case DppMode::Approximate: return "approx";
        case DppMode::Separable: return "separable";
    }
    return "?";
}

std::size_t dpp_select(const double* r, std::size_t count, std::size_t width, std::span<const double> q, double V) {
    std::size_t best = 0;
    double best_score = 0.0;
    for (std::size_t m = 0; m < count; ++m) {
        const double* row = r + m * width;
        double score = V * row[0];
        for (std::size_t k = 0; k < q.size(); ++k) score += q[k] * row[k + 1];
        if (m == 0 || score < best_score) {
            best = m;
            best_score = score;
        }
    }
    return best;
}

std::size_t dpp_select(const std::vector<RVector>& r, std::span<const double> q, double V) {
    if (r.empty()) throw std::invalid_argument("dpp_select: empty strategy set");
    std::size_t best = 0;
    double best_score = 0.0;
    for (std::size_t m = 0; m < r.size(); ++m) {
        double score = V * r[m][0];
        for (std::size_t k = 0; k < q.size(); ++k) score += q[k] * r[m][k + 1];
        if (m == 0 || score < best_score) {
            best = m;
            best_score = score;
        }
    }
    return best;
}

RollingEstimator::RollingEstimator(const ProblemSpec& spec, const PenaltyTable& table,
                                   const StrategySet& strategies, std::size_t window)
    : spec_(&spec),
      table_(&table),
      strategies_(&strategies),
      window_(window),
      width_(table.width()),
      ring_(window * spec.users(), 0),
      ring_flat_(window, 0),
      sums_(strategies.size() * table.width(), 0.0),
      scratch_(table.width(), 0.0) {
    if (window == 0) throw std::invalid_argument("RollingEstimator: window must be at least 1");
    if (strategies.size() == 0) throw std::invalid_argument("RollingEstimator: empty strategy set");
}

void RollingEstimator::add(std::size_t slot, double sign) {
    const std::span<const int> omega(ring_.data() + slot * spec_->users(), spec_->users());
    const std::size_t wf = ring_flat_[slot];
    for (std::size_t m = 0; m < strategies_->size(); ++m) {
        const std::size_t af = strategies_->action_index(m, omega);
        double* acc = sums_.data() + m * width_;
        if (table_->tabulated()) {
            const double* p = table_->row(wf, af);
            for (std::size_t k = 0; k < width_; ++k) acc[k] += sign * p[k];
        } else {
            table_->penalties(wf, af, scratch_);
            for (std::size_t k = 0; k < width_; ++k) acc[k] += sign * scratch_[k];
        }
    }
}

void RollingEstimator::rebuild() {
    std::fill(sums_.begin(), sums_.end(), 0.0);
    for (std::size_t s = 0; s < count_; ++s) add(s, 1.0);
    pushes_since_rebuild_ = 0;
}

void RollingEstimator::push(std::span<const int> omega) {
    const std::size_t n = spec_->users();
    if (omega.size() != n) throw std::invalid_argument("RollingEstimator::push: wrong event dimension");
    if (count_ == window_) add(next_, -1.0);
    std::copy(omega.begin(), omega.end(), ring_.begin() + static_cast<std::ptrdiff_t>(next_ * n));
    ring_flat_[next_] = spec_->events.encode(omega);
    add(next_, 1.0);
    next_ = (next_ + 1) % window_;
    count_ = std::min(count_ + 1, window_);
    if (++pushes_since_rebuild_ >= std::max<std::size_t>(window_, 1024)) rebuild();
}

std::size_t RollingEstimator::select(std::span<const double> q, double V) const {
    if (count_ == 0) return 0;
    // Sums are the window averages scaled by count_, which leaves the argmin unchanged.
    return dpp_select(sums_.data(), strategies_->size(), width_, q, V);
}

SeparableModel::SeparableModel(const ProblemSpec& spec) : n_users_(spec.users()) {
    for (std::size_t k = 0; k < spec.penalties.size(); ++k) {
        auto tables = spec.penalties[k].decompose(spec.actions, spec.events);
        if (!tables) throw NotSeparable("penalty " + std::to_string(k) + " is not a sum of per-user terms");
        tables_.push_back(std::move(*tables));
    }
}

int SeparableModel::select_user(std::size_t user, std::span<const double> q, double V, int omega_i) const {
    const std::size_t n_actions = tables_[0][user].size();
    int best = 0;
    double best_score = 0.0;
    for (std::size_t a = 0; a < n_actions; ++a) {
        double score = V * tables_[0][user][a][static_cast<std::size_t>(omega_i)];
        for (std::size_t k = 0; k < q.size(); ++k) score += q[k] * tables_[k + 1][user][a][static_cast<std::size_t>(omega_i)];
        if (a == 0 || score < best_score) {
            best = static_cast<int>(a);
            best_score = score;
        }
    }
    return best;
}

std::vector<int> SeparableModel::select(std::span<const double> q, double V, std::span<const int> omega) const {
    if (q.size() + 1 != tables_.size()) throw std::invalid_argument("SeparableModel::select: queue dimension mismatch");
    std::vector<int> alpha(n_users_);
    for (std::size_t i = 0; i < n_users_; ++i) alpha[i] = select_user(i, q, V, omega[i]);
    return alpha;
}

std::vector<int> separable_select(const ProblemSpec& spec, std::span<const double> q, double V,
                                  std::span<const int> omega) {
    return SeparableModel(spec).select(q, V, omega);
}

double compute_B(const ProblemSpec& spec, const std::vector<PureStrategy>& strategies) {
    const std::size_t K = spec.num_constraints();
    if (K == 0 || strategies.empty()) return 0.0;
    const PenaltyTable table(spec);
    const StrategySet set(spec, strategies);
    std::vector<int> omega(spec.users());
    double best = 0.0;
    for (std::size_t m = 0; m < set.size(); ++m) {
        double term = 0.0;
        for (std::size_t wf = 0; wf < spec.events.total(); ++wf) {
            const double pi = spec.distribution.probability_flat(spec.events, wf);
            if (pi == 0.0) continue;
            spec.events.decode(wf, omega);
            const std::size_t af = set.action_index(m, omega);
            for (std::size_t k = 0; k < K; ++k) {
                const double d = table.at(wf, af, k + 1) - spec.constraints[k];
                term += pi * d * d;
            }
        }
        best = std::max(best, 0.5 * term);
    }
    return best;
}

std::pair<double, double> penalty_range(const ProblemSpec& spec, std::size_t k) {
    const PenaltyTable table(spec);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t wf = 0; wf < spec.events.total(); ++wf) {
        if (spec.distribution.probability_flat(spec.events, wf) == 0.0) continue;
        for (std::size_t af = 0; af < spec.actions.total(); ++af) {
            const double v = table.at(wf, af, k);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    return {lo, hi};
}

double compute_F(const ProblemSpec& spec, const std::vector<RVector>& r, double reference) {
    const auto [lo, hi] = penalty_range(spec, 0);
    double gap = 0.0;
    for (const auto& v : r) gap = std::max(gap, std::abs(reference - v[0]));
    return gap + (hi - lo);
}

double compute_delta_max(const ProblemSpec& spec) {
    double sq = 0.0;
    for (std::size_t k = 0; k < spec.num_constraints(); ++k) {
        const auto [lo, hi] = penalty_range(spec, k + 1);
        const double c = spec.constraints[k];
        const double d = std::max(std::abs(hi - c), std::abs(lo - c));
        sq += d * d;
    }
    return std::sqrt(sq);
}

double performance_bound(double B, std::size_t D, double V, double t, double L_D, double p0_opt) {
    if (!(V > 0.0)) throw std::invalid_argument("performance_bound: V must be positive");
    if (!(t > 0.0)) throw std::invalid_argument("performance_bound: t must be positive");
    return p0_opt + B * (1.0 + 2.0 * static_cast<double>(D)) / V + L_D / (V * t);
}

double slater_rate(double eps, double delta_max) {
    return eps / (delta_max * delta_max + eps * delta_max / 3.0);
}

double slater_queue_bound(double A, double eps, double delta_max, double t) {
    if (!(eps > 0.0) || !(delta_max > 0.0) || t < 1.0) {
        throw std::invalid_argument("slater_queue_bound: needs eps > 0, delta_max > 0, t >= 1");
    }
    const double r = slater_rate(eps, delta_max);
    const double tail = std::max(2.0 * A / eps, eps / 2.0) + std::log(2.0 * t * std::expm1(r * delta_max)) / r;
    return std::max(std::log(2.0) / r, tail);
}

double mean_rate_envelope(double C, double F, double V, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("mean_rate_envelope: t must be positive");
    return std::sqrt(2.0 * (C + F * V) / t);
}

}  // namespace corrsched
