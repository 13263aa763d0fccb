#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "insight/search.hpp"
#include "insight/synth.hpp"

namespace insight::report {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

json to_json(const mining::Pattern& p);
mining::Pattern pattern_from_json(const json& j);

json to_json(const search::SearchConfig& c);
json to_json(const intr::IntrConfig& c);
json to_json(const search::PatternDescriptor& d);
search::PatternDescriptor descriptor_from_json(const json& j);
json to_json(const synth::PlantedPatternSpec& s);
synth::PlantedPatternSpec spec_from_json(const json& j);

/// Applies overrides onto `base`; unknown keys throw InputError.
intr::IntrConfig intr_from_json(const json& j, intr::IntrConfig base = {});
/// Either {"preset": "C4", ...overrides} or a full description. Unknown keys throw InputError.
search::SearchConfig search_config_from_json(const json& j);

struct RunMetadata {
  search::SearchConfig config;
  std::string input;
  std::size_t iterations = 0;
  std::size_t node_count = 0;
  std::size_t model_action_count = 0;
  std::optional<double> wall_time;  // only written on request; reports are otherwise reproducible
};

struct ReportDocument {
  int schema_version = kSchemaVersion;
  RunMetadata run;
  std::vector<mining::Pattern> patterns;  // interestingness descending

  bool operator==(const ReportDocument& o) const;
};

/// Sorts by interestingness (desc), then discovery iteration, then state key.
ReportDocument make_report(const search::SearchResult& r, const search::SearchConfig& cfg, std::string input,
                           bool include_wall_time = false);

json to_json(const ReportDocument& r);
ReportDocument report_from_json(const json& j);
std::string to_markdown(const ReportDocument& r);

/// Canonical text: sorted keys, two-space indent, trailing newline.
std::string dump(const json& j);

/// Run configuration file for `discover`.
struct RunConfigFile {
  std::optional<search::SearchConfig> search;
  std::optional<std::string> input;
  std::optional<std::string> schema;
  std::optional<std::string> output;
  std::optional<std::string> format;
  std::vector<uint64_t> seeds;
};

RunConfigFile run_config_from_json(const json& j);
RunConfigFile load_run_config(const std::filesystem::path& path);

}  // namespace insight::report
