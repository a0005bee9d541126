#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace corrsched {

/// Saturating product used when counting strategies and table sizes.
std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) noexcept;

/// Mixed-radix index over a product of dense integer ranges.
///
/// Coordinate 0 is the most significant digit, so flat indices enumerate
/// tuples in lexicographic order with user 0 varying slowest.
class IndexSpace {
public:
    IndexSpace() = default;
    explicit IndexSpace(std::vector<int> sizes);

    std::size_t dims() const noexcept { return sizes_.size(); }
    std::size_t total() const noexcept { return total_; }
    int size(std::size_t i) const { return sizes_[i]; }
    std::size_t stride(std::size_t i) const { return strides_[i]; }
    const std::vector<int>& sizes() const noexcept { return sizes_; }

    std::size_t encode(std::span<const int> coords) const;
    void decode(std::size_t flat, std::span<int> coords) const;
    std::vector<int> decode(std::size_t flat) const;
    bool contains(std::span<const int> coords) const noexcept;

private:
    std::vector<int> sizes_;
    std::vector<std::size_t> strides_;
    std::size_t total_ = 1;
};

}  // namespace corrsched
