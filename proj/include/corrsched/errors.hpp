#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace corrsched {

/// Raised by exhaustive routines whose work would exceed a configured cap.
class CapExceeded : public std::runtime_error {
public:
    CapExceeded(const std::string& what_for, std::uint64_t count, std::uint64_t cap)
        : std::runtime_error(what_for + ": " + std::to_string(count) + " exceeds cap " +
                             std::to_string(cap)),
          count_(count),
          cap_(cap) {}

    std::uint64_t count() const noexcept { return count_; }
    std::uint64_t cap() const noexcept { return cap_; }

private:
    std::uint64_t count_;
    std::uint64_t cap_;
};

class SpecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotSeparable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Infeasible : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace corrsched
