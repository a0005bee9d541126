#include "corrsched/index_space.hpp"

#include <limits>
#include <stdexcept>

namespace corrsched {

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) noexcept {
    if (a == 0 || b == 0) return 0;
    if (a > std::numeric_limits<std::uint64_t>::max() / b) {
        return std::numeric_limits<std::uint64_t>::max();
    }
    return a * b;
}

IndexSpace::IndexSpace(std::vector<int> sizes) : sizes_(std::move(sizes)), strides_(sizes_.size()) {
    std::uint64_t total = 1;
    for (std::size_t i = sizes_.size(); i-- > 0;) {
        if (sizes_[i] < 1) throw std::invalid_argument("IndexSpace: sizes must be >= 1");
        strides_[i] = static_cast<std::size_t>(total);
        total = saturating_mul(total, static_cast<std::uint64_t>(sizes_[i]));
    }
    if (total > std::numeric_limits<std::size_t>::max() / 2) {
        throw std::overflow_error("IndexSpace: product of sizes overflows");
    }
    total_ = static_cast<std::size_t>(total);
}

std::size_t IndexSpace::encode(std::span<const int> coords) const {
    std::size_t flat = 0;
    for (std::size_t i = 0; i < sizes_.size(); ++i) {
        flat += static_cast<std::size_t>(coords[i]) * strides_[i];
    }
    return flat;
}

void IndexSpace::decode(std::size_t flat, std::span<int> coords) const {
    for (std::size_t i = 0; i < sizes_.size(); ++i) {
        coords[i] = static_cast<int>(flat / strides_[i]);
        flat %= strides_[i];
    }
}

std::vector<int> IndexSpace::decode(std::size_t flat) const {
    std::vector<int> coords(sizes_.size());
    decode(flat, coords);
    return coords;
}

bool IndexSpace::contains(std::span<const int> coords) const noexcept {
    if (coords.size() != sizes_.size()) return false;
    for (std::size_t i = 0; i < sizes_.size(); ++i) {
        if (coords[i] < 0 || coords[i] >= sizes_[i]) return false;
    }
    return true;
}

}  // namespace corrsched
