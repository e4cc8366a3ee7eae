#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sps/config.hpp"
#include "sps/metrics.hpp"

namespace sps {

struct RunRecord;
struct ComparisonReport;

// YAML scenario files. Missing keys keep their defaults; unknown keys raise
// ConfigError naming the key path; malformed text raises ParseError with the
// 1-based line. The result is validated.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);

// Canonical YAML: every key in a fixed order, doubles in shortest
// round-trip form. parse_config(save_config(c)) == c.
std::string save_config(const ScenarioConfig& config);

std::uint64_t fnv1a(std::string_view bytes) noexcept;

// Hash of the canonical text with the seed and output directory removed, so
// the same scenario hashes the same wherever and however often it runs.
std::uint64_t config_hash(const ScenarioConfig& config);
std::string hex64(std::uint64_t v);

inline constexpr std::string_view kFramesHeader =
    "step,institution,seed,welfare_AM,welfare_AF,welfare_BM,welfare_BF,welfare_CM,welfare_CF,"
    "tfr,gini_wealth,gini_welfare,unpartnered_male_frac,births,deaths";

std::string frames_csv(const std::vector<MetricsFrame>& frames, std::string_view institution,
                       std::uint64_t seed);

// Structured run summary; contains nothing that depends on wall-clock time.
std::string record_json(const RunRecord& record);

std::string comparison_csv(const ComparisonReport& report);
std::string comparison_json(const ComparisonReport& report);

// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

// frames.csv, record.json and graph.csv under `dir`.
void write_run(const RunRecord& record, const std::filesystem::path& dir);

}  // namespace sps
