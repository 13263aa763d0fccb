#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "insight/cli.hpp"
#include "insight/error.hpp"
#include "insight/report.hpp"

using namespace insight;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "insight");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("insight_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const std::string kIris = std::string(INSIGHT_TEST_DATA) + "/iris.csv";

}  // namespace

TEST_CASE("report documents round trip") {
  auto cfg = search::preset("C6");
  cfg.iterations = 120;
  cfg.seed = 3;
  cfg.intr.t_quant = 2.5;
  const auto r = search::run_search(fixtures::planted_outlier(), cfg);
  const auto doc = report::make_report(r, cfg, "planted.csv", true);
  const auto text = report::dump(report::to_json(doc));
  const auto back = report::report_from_json(report::json::parse(text));
  CHECK(back == doc);
  CHECK(report::dump(report::to_json(back)) == text);
  for (std::size_t i = 1; i < doc.patterns.size(); ++i)
    CHECK(doc.patterns[i - 1].interestingness >= doc.patterns[i].interestingness);
  for (const auto& p : doc.patterns) CHECK(p.interestingness > 0.5);
}

TEST_CASE("search config json") {
  const auto c = report::search_config_from_json(report::json::parse(R"({"preset": "C8", "seed": 5})"));
  CHECK(c.expansion == search::ExpansionMode::FixedFanOut);
  CHECK(c.seed == 5);
  CHECK(report::search_config_from_json(report::to_json(c)).seed == 5);
  CHECK_THROWS_AS(report::search_config_from_json(report::json::parse(R"({"treePolicy": "greedy"})")), InputError);
  CHECK_THROWS_AS(report::search_config_from_json(report::json::parse(R"({"colour": 1})")), InputError);
  CHECK_THROWS_AS(report::search_config_from_json(report::json::parse(R"({"intr": {"tQuant": -1}})")), InputError);
  for (const auto& name : search::preset_names()) {
    const auto p = search::preset(name);
    CHECK(report::to_json(report::search_config_from_json(report::to_json(p))) == report::to_json(p));
  }
}

TEST_CASE("run config file") {
  const auto f = report::run_config_from_json(report::json::parse(
      R"({"preset": "C2", "intr": {"tQual": 0.9}, "input": "a.csv", "format": "markdown", "seeds": [1, 2]})"));
  REQUIRE(f.search);
  CHECK(f.search->name == "C2");
  CHECK(f.search->intr.t_qual == 0.9);
  CHECK(f.seeds == std::vector<uint64_t>{1, 2});
  CHECK_THROWS_AS(report::run_config_from_json(report::json::parse(R"({"inptu": "a.csv"})")), InputError);
  CHECK_THROWS_AS(report::run_config_from_json(report::json::parse(R"({"format": "html"})")), InputError);
}

TEST_CASE("integer lists") {
  CHECK(cli::parse_int_list("1..4") == std::vector<uint64_t>{1, 2, 3, 4});
  CHECK(cli::parse_int_list("3, 5,7") == std::vector<uint64_t>{3, 5, 7});
  CHECK(cli::parse_int_list("1..2,9") == std::vector<uint64_t>{1, 2, 9});
  CHECK_THROWS_AS(cli::parse_int_list("4..1"), InputError);
  CHECK_THROWS_AS(cli::parse_int_list("x"), InputError);
}

TEST_CASE("discover on iris finds the class tree") {
  const auto r = invoke({"discover", "--input", kIris, "--preset", "C4", "--iterations", "500", "--seed", "7"});
  REQUIRE(r.code == 0);
  const auto doc = report::report_from_json(report::json::parse(r.out));
  bool found = false;
  for (const auto& p : doc.patterns) {
    if (p.model_kind != "decisionTree" || p.target_base != "class") continue;
    if (p.summary.find("top split petal_length") != std::string::npos) found = true;
  }
  CHECK(found);
}

TEST_CASE("discover edge cases and exit codes") {
  const auto empty = invoke({"discover", "--input", kIris, "--iterations", "0"});
  CHECK(empty.code == 0);
  CHECK(report::report_from_json(report::json::parse(empty.out)).patterns.empty());

  const auto a = invoke({"discover", "--input", kIris, "--preset", "C3", "--iterations", "80", "--seed", "2"});
  const auto b = invoke({"discover", "--input", kIris, "--preset", "C3", "--iterations", "80", "--seed", "2"});
  CHECK(a.out == b.out);

  CHECK(invoke({"discover", "--preset", "C1"}).code == 2);
  CHECK(invoke({"discover", "--input", "/nonexistent.csv"}).code == 2);
  CHECK(invoke({"discover", "--input", kIris, "--preset", "C99"}).code == 2);
  CHECK(invoke({"discover", "--input", kIris, "--format", "xml"}).code == 2);
  CHECK(invoke({"discover", "--input", kIris, "--threshold", "1.5"}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({}).code == 2);

  const auto dir = scratch("discover");
  std::ofstream(dir / "schema.json") << R"({"sepal_length": "datetime"})";
  CHECK(invoke({"discover", "--input", kIris, "--schema", (dir / "schema.json").string()}).code == 2);
  std::ofstream(dir / "bad.json") << "{not json";
  CHECK(invoke({"discover", "--input", kIris, "--config", (dir / "bad.json").string()}).code == 2);

  const auto md = invoke({"discover", "--input", kIris, "--iterations", "30", "--format", "md", "--trace",
                       (dir / "trace.jsonl").string()});
  CHECK(md.code == 0);
  CHECK(md.out.rfind("# Insight report", 0) == 0);
  CHECK(fs::file_size(dir / "trace.jsonl") > 0);
}

TEST_CASE("generate writes data, schema and manifest") {
  const auto dir = scratch("generate");
  const auto r = invoke({"generate", "--scenario", "2", "--variant", "A", "--seed", "1", "--output", dir.string()});
  REQUIRE(r.code == 0);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir)) files += e.is_regular_file();
  CHECK(files == 3);
  const auto d = tabular::load_csv(dir / "SD_A.csv", tabular::load_schema(dir / "SD_A.schema.json"));
  CHECK(d.row_count() == 1000);
  CHECK(d.column_count() == 5);
  const auto first = slurp(dir / "SD_A.csv") + slurp(dir / "SD_A.manifest.json");
  invoke({"generate", "--scenario", "2", "--variant", "A", "--seed", "1", "--output", dir.string()});
  CHECK(slurp(dir / "SD_A.csv") + slurp(dir / "SD_A.manifest.json") == first);
  CHECK(invoke({"generate", "--scenario", "2", "--variant", "Q", "--output", dir.string()}).code == 2);
  CHECK(invoke({"generate", "--scenario", "1", "--variant", "12", "--output", dir.string()}).code == 2);
}

TEST_CASE("benchmark grid and aggregates") {
  const auto dir = scratch("bench");
  const auto r = invoke({"benchmark", "--scenario", "2", "--datasets", "A", "--presets", "C1,C3", "--cutoffs", "100,250",
                      "--seeds", "1..10", "--output", dir.string()});
  REQUIRE(r.code == 0);
  std::size_t cells = 0;
  for (const auto& e : fs::directory_iterator(dir / "cells")) cells += e.is_regular_file();
  CHECK(cells == 40);

  // Recompute the aggregates from the files alone.
  const auto manifest = report::json::parse(slurp(dir / "datasets" / "SD_A.manifest.json"));
  std::vector<synth::PlantedPatternSpec> specs;
  for (const auto& s : manifest.at("specs")) specs.push_back(report::spec_from_json(s));
  cli::BenchmarkSummary again;
  for (const auto& e : fs::directory_iterator(dir / "cells")) {
    const auto doc = report::report_from_json(report::json::parse(slurp(e.path())));
    cli::BenchmarkCell c;
    c.dataset = "SD_A";
    c.preset = doc.run.config.name;
    c.seed = doc.run.config.seed;
    c.cutoff = doc.run.iterations;
    c.evaluation = synth::evaluate_run(doc.patterns, specs);
    for (const auto& p : doc.patterns)
      for (const auto& s : specs)
        if (s.matches(p) && (!c.first_found || p.discovery_iteration < *c.first_found)) c.first_found = p.discovery_iteration;
    again.cells.push_back(std::move(c));
  }
  cli::aggregate(again);
  const auto summary = report::json::parse(slurp(dir / "summary.json"));
  CHECK(cli::to_json(again).at("aggregates") == summary.at("aggregates"));
  CHECK(cli::to_json(again).at("foundRanks") == summary.at("foundRanks"));

  CHECK(invoke({"benchmark", "--scenario", "2", "--datasets", "Z", "--seeds", "1"}).code == 2);
  CHECK(invoke({"benchmark", "--scenario", "2", "--datasets", "A", "--presets", "C0", "--seeds", "1"}).code == 2);
}

TEST_CASE("cut-off cells match separate runs") {
  cli::BenchmarkOptions o;
  o.scenario = 1;
  o.datasets = {"1"};
  o.presets = {"C5"};
  o.cutoffs = {30, 60};
  o.seeds = {4};
  const auto s = cli::run_benchmark(o);
  REQUIRE(s.cells.size() == 2);
  const auto g = cli::make_dataset(1, "1", o.data_seed);
  auto cfg = search::preset("C5");
  cfg.seed = 4;
  cfg.iterations = 30;
  const auto direct = report::make_report(search::run_search(g.dataset, cfg), cfg, g.name + ".csv");
  CHECK(direct == s.cells[0].report);
}
