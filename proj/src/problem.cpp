#include "corrsched/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace corrsched {

namespace {
constexpr std::size_t kFinitenessCheckCap = 10'000'000;
}

ProblemSpec::ProblemSpec(std::vector<int> action_sizes, std::vector<int> event_sizes,
                         EventDistribution dist, std::vector<PenaltyFn> penalties_,
                         std::vector<double> constraints_)
    : actions(std::move(action_sizes)),
      events(std::move(event_sizes)),
      distribution(std::move(dist)),
      penalties(std::move(penalties_)),
      constraints(std::move(constraints_)) {}

ValidationReport validate_spec(const ProblemSpec& spec) {
    ValidationReport report;
    auto& v = report.violations;

    if (spec.users() == 0) v.push_back("users: must be at least 1");
    if (spec.actions.dims() != spec.events.dims()) {
        v.push_back("size mismatch: action_sizes and event_sizes differ in length");
        return report;
    }
    if (spec.penalties.size() != spec.constraints.size() + 1) {
        v.push_back("size mismatch: expected " + std::to_string(spec.constraints.size() + 1) +
                    " penalties for " + std::to_string(spec.constraints.size()) + " constraints");
    }
    for (std::size_t k = 0; k < spec.constraints.size(); ++k) {
        if (!std::isfinite(spec.constraints[k])) v.push_back("constraint " + std::to_string(k + 1) + ": not finite");
    }
    for (auto& msg : spec.distribution.violations(spec.events)) v.push_back(msg);

    bool structural_ok = true;
    for (std::size_t k = 0; k < spec.penalties.size(); ++k) {
        for (auto& msg : spec.penalties[k].violations(spec.actions, spec.events)) {
            v.push_back("penalty " + std::to_string(k) + ": " + msg);
            structural_ok = false;
        }
    }

    const std::uint64_t evaluations =
        saturating_mul(saturating_mul(spec.actions.total(), spec.events.total()), spec.penalties.size());
    if (structural_ok && evaluations <= kFinitenessCheckCap) {
        std::vector<int> a(spec.users());
        std::vector<int> w(spec.users());
        for (std::size_t k = 0; k < spec.penalties.size(); ++k) {
            bool finite = true;
            for (std::size_t wf = 0; finite && wf < spec.events.total(); ++wf) {
                spec.events.decode(wf, w);
                for (std::size_t af = 0; af < spec.actions.total(); ++af) {
                    spec.actions.decode(af, a);
                    if (!std::isfinite(spec.penalties[k].evaluate(a, w))) {
                        finite = false;
                        break;
                    }
                }
            }
            if (!finite) v.push_back("penalty " + std::to_string(k) + ": non-finite value");
        }
    }
    return report;
}

double eval_penalty(const ProblemSpec& spec, std::size_t k, std::span<const int> alpha,
                    std::span<const int> omega) {
    if (k >= spec.penalties.size()) {
        throw std::out_of_range("eval_penalty: penalty index " + std::to_string(k) + " out of range");
    }
    if (!spec.actions.contains(alpha) || !spec.events.contains(omega)) {
        throw std::out_of_range("eval_penalty: action or event vector out of range");
    }
    return spec.penalties[k].evaluate(alpha, omega);
}

double event_probability(const ProblemSpec& spec, std::span<const int> omega) {
    return spec.distribution.probability(spec.events, omega);
}

std::vector<int> sample_event(const ProblemSpec& spec, Rng& rng) {
    std::vector<int> w(spec.users());
    spec.distribution.sample(spec.events, rng, w);
    return w;
}

PenaltyTable::PenaltyTable(const ProblemSpec& spec, std::size_t max_entries)
    : spec_(&spec), width_(spec.penalties.size()), n_actions_(spec.actions.total()) {
    const std::uint64_t entries =
        saturating_mul(saturating_mul(spec.actions.total(), spec.events.total()), width_);
    if (entries > max_entries) return;
    values_.resize(static_cast<std::size_t>(entries));
    std::vector<int> a(spec.users());
    std::vector<int> w(spec.users());
    for (std::size_t wf = 0; wf < spec.events.total(); ++wf) {
        spec.events.decode(wf, w);
        for (std::size_t af = 0; af < n_actions_; ++af) {
            spec.actions.decode(af, a);
            for (std::size_t k = 0; k < width_; ++k) {
                values_[(wf * n_actions_ + af) * width_ + k] = spec.penalties[k].evaluate(a, w);
            }
        }
    }
}

void PenaltyTable::penalties(std::size_t omega_flat, std::size_t alpha_flat, std::span<double> out) const {
    if (!values_.empty()) {
        const double* r = row(omega_flat, alpha_flat);
        for (std::size_t k = 0; k < width_; ++k) out[k] = r[k];
        return;
    }
    for (std::size_t k = 0; k < width_; ++k) out[k] = direct(omega_flat, alpha_flat, k);
}

double PenaltyTable::direct(std::size_t omega_flat, std::size_t alpha_flat, std::size_t k) const {
    const auto w = spec_->events.decode(omega_flat);
    const auto a = spec_->actions.decode(alpha_flat);
    return spec_->penalties[k].evaluate(a, w);
}

}  // namespace corrsched
