#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "corrsched/problem.hpp"

namespace corrsched {

/// Event law active on slots [start, end).
struct Phase {
    std::uint64_t start = 0;
    std::uint64_t end = 0;
    EventDistribution distribution;
};

/// Accepts a JSON number or a string holding a decimal or a ratio "p/q".
double parse_real(const nlohmann::json& j);

ProblemSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const ProblemSpec& spec);

/// Reads a problem file and validates it; throws SpecError on any violation.
ProblemSpec load_spec(const std::filesystem::path& path);
void save_spec(const ProblemSpec& spec, const std::filesystem::path& path);

/// Phase schedules may use product marginals with zero entries; those are
/// expanded to joint tables since they are only ever sampled from.
std::vector<Phase> phases_from_json(const nlohmann::json& j, const IndexSpace& events);
std::vector<Phase> load_phases(const std::filesystem::path& path, const IndexSpace& events);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace corrsched
