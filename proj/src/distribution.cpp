#include "corrsched/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace corrsched {

namespace {

constexpr double kNormalizationTol = 1e-12;

std::vector<double> cumulative(const std::vector<double>& p) {
    std::vector<double> cdf(p.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        cdf[i] = acc;
    }
    return cdf;
}

// Inverse CDF; skips zero-mass outcomes even when u lands on a flat stretch.
std::size_t invert(const std::vector<double>& cdf, double u) {
    const double scaled = u * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), scaled);
    if (it == cdf.end()) --it;
    return static_cast<std::size_t>(it - cdf.begin());
}

}  // namespace

EventDistribution EventDistribution::joint(std::vector<double> table) {
    EventDistribution d;
    d.mode_ = Mode::Joint;
    d.joint_ = std::move(table);
    d.build_cdfs();
    return d;
}

EventDistribution EventDistribution::product(std::vector<std::vector<double>> marginals) {
    EventDistribution d;
    d.mode_ = Mode::Product;
    d.marginals_ = std::move(marginals);
    d.build_cdfs();
    return d;
}

void EventDistribution::build_cdfs() {
    if (mode_ == Mode::Joint) {
        joint_cdf_ = joint_.empty() ? std::vector<double>{} : cumulative(joint_);
    } else {
        marginal_cdfs_.clear();
        for (const auto& m : marginals_) marginal_cdfs_.push_back(cumulative(m));
    }
}

double EventDistribution::probability(const IndexSpace& events, std::span<const int> omega) const {
    if (mode_ == Mode::Joint) return joint_[events.encode(omega)];
    double p = 1.0;
    for (std::size_t i = 0; i < marginals_.size(); ++i) p *= marginals_[i][omega[i]];
    return p;
}

double EventDistribution::probability_flat(const IndexSpace& events, std::size_t flat) const {
    if (mode_ == Mode::Joint) return joint_[flat];
    double p = 1.0;
    for (std::size_t i = 0; i < marginals_.size(); ++i) {
        const auto digit = (flat / events.stride(i)) % static_cast<std::size_t>(events.size(i));
        p *= marginals_[i][digit];
    }
    return p;
}

std::size_t EventDistribution::sample(const IndexSpace& events, Rng& rng,
                                      std::span<int> omega) const {
    if (mode_ == Mode::Joint) {
        const std::size_t flat = invert(joint_cdf_, rng.uniform());
        events.decode(flat, omega);
        return flat;
    }
    std::size_t flat = 0;
    for (std::size_t i = 0; i < marginal_cdfs_.size(); ++i) {
        omega[i] = static_cast<int>(invert(marginal_cdfs_[i], rng.uniform()));
        flat += static_cast<std::size_t>(omega[i]) * events.stride(i);
    }
    return flat;
}

EventDistribution EventDistribution::as_joint(const IndexSpace& events) const {
    if (mode_ == Mode::Joint) return *this;
    std::vector<double> table(events.total());
    for (std::size_t f = 0; f < table.size(); ++f) table[f] = probability_flat(events, f);
    return joint(std::move(table));
}

std::vector<std::string> EventDistribution::violations(const IndexSpace& events) const {
    std::vector<std::string> out;
    auto check_table = [&](const std::vector<double>& t, const std::string& label) {
        double sum = 0.0;
        for (std::size_t j = 0; j < t.size(); ++j) {
            if (!std::isfinite(t[j]) || t[j] < 0.0) {
                std::ostringstream os;
                os << label << ": negative or non-finite probability at index " << j;
                out.push_back(os.str());
            }
            sum += t[j];
        }
        if (std::abs(sum - 1.0) > kNormalizationTol) {
            std::ostringstream os;
            os.precision(17);
            os << label << ": not normalized (sum " << sum << ")";
            out.push_back(os.str());
        }
    };

    if (mode_ == Mode::Joint) {
        if (joint_.size() != events.total()) {
            out.push_back("joint distribution: size mismatch (expected " +
                          std::to_string(events.total()) + ", got " +
                          std::to_string(joint_.size()) + ")");
            return out;
        }
        check_table(joint_, "joint distribution");
        return out;
    }

    if (marginals_.size() != events.dims()) {
        out.push_back("product distribution: expected " + std::to_string(events.dims()) +
                      " marginals, got " + std::to_string(marginals_.size()));
        return out;
    }
    for (std::size_t i = 0; i < marginals_.size(); ++i) {
        const std::string label = "product marginal " + std::to_string(i);
        if (marginals_[i].size() != static_cast<std::size_t>(events.size(i))) {
            out.push_back(label + ": size mismatch");
            continue;
        }
        check_table(marginals_[i], label);
        for (std::size_t w = 0; w < marginals_[i].size(); ++w) {
            if (marginals_[i][w] == 0.0) {
                out.push_back(label + ": zero marginal at event " + std::to_string(w));
            }
        }
    }
    return out;
}

}  // namespace corrsched
