#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "insight/report.hpp"
#include "insight/synth.hpp"

namespace insight::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInternal = 3;

/// Parses "1..10", "3,5,7" or mixtures such as "1..3,9". Throws InputError.
std::vector<uint64_t> parse_int_list(const std::string& text);

struct DiscoverOptions {
  std::optional<std::string> input;
  std::optional<std::string> schema;
  std::optional<std::string> config;
  std::optional<std::string> preset;
  std::optional<std::size_t> iterations;
  std::optional<uint64_t> seed;
  std::optional<double> threshold;
  std::optional<std::string> output;
  std::optional<std::string> format;  // json | md
  std::optional<std::string> trace;
  bool wall_time = false;
};

/// Resolves flags against an optional config file. Flags win over file values.
struct DiscoverPlan {
  search::SearchConfig config;
  std::string input;
  std::optional<std::string> schema;
  std::optional<std::string> output;
  std::string format = "json";
  std::vector<uint64_t> seeds;
};
DiscoverPlan plan_discover(const DiscoverOptions& o);

/// Runs one seed of a plan and returns the report.
report::ReportDocument discover(const DiscoverPlan& plan, uint64_t seed, std::ostream* trace = nullptr,
                                bool wall_time = false);

std::string render(const report::ReportDocument& r, const std::string& format);

struct BenchmarkOptions {
  int scenario = 2;
  std::vector<std::string> datasets;  // scenario 1: "1".."10"; scenario 2: "A".."E"; empty = all
  std::vector<std::string> presets;   // empty = C1..C10
  std::vector<std::size_t> cutoffs = {100, 250, 500, 1000};
  std::vector<uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  uint64_t data_seed = 2024;
  std::optional<std::string> output;
};

struct BenchmarkCell {
  std::string dataset;
  std::string preset;
  uint64_t seed = 0;
  std::size_t cutoff = 0;
  report::ReportDocument report;
  synth::RunEvaluation evaluation;
  std::optional<std::size_t> first_found;  // earliest discovery iteration of a pattern matching any spec
};

struct BenchmarkAggregate {
  std::string dataset;
  std::string preset;
  std::size_t cutoff = 0;
  double found = 0.0;  // sum over specs of the expected found value
  double count = 0.0;  // sum over specs of the expected count
  double other = 0.0;  // expected number of reported patterns matching no spec
  double total = 0.0;  // expected number of reported patterns
  std::optional<double> mean_first_found;  // over seeds where something was found
  std::size_t seeds = 0;
};

struct BenchmarkSummary {
  int scenario = 2;
  std::vector<BenchmarkCell> cells;
  std::vector<BenchmarkAggregate> aggregates;
  std::map<std::size_t, std::map<std::string, double>> found_ranks;  // cutoff -> preset -> average rank
  std::map<std::size_t, std::map<std::string, double>> count_ranks;
};

/// Aggregates over seeds and ranks presets per cutoff. Pure function of the cells.
void aggregate(BenchmarkSummary& s);

BenchmarkSummary run_benchmark(const BenchmarkOptions& o, std::ostream* log = nullptr);

report::json to_json(const BenchmarkSummary& s);  // aggregates and rank tables
std::string to_markdown(const BenchmarkSummary& s);

struct GenerateOptions {
  int scenario = 2;
  std::string variant = "A";
  uint64_t seed = 1;
  std::string output = ".";
};

/// Writes <name>.csv, <name>.schema.json and <name>.manifest.json; returns their paths.
std::vector<std::string> generate(const GenerateOptions& o);

synth::GeneratedDataset make_dataset(int scenario, const std::string& variant, uint64_t seed);
report::json manifest_json(const synth::GeneratedDataset& g, int scenario, const std::string& variant);

/// Full command line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace insight::cli
