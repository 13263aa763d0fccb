#include "insight/cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "insight/csv.hpp"
#include "insight/error.hpp"
#include "insight/timefmt.hpp"

namespace insight::cli {
namespace fs = std::filesystem;

namespace {

uint64_t parse_uint(std::string_view s) {
  uint64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end) throw InputError("not a non-negative integer: '" + std::string(s) + "'");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) {
    cur.erase(0, cur.find_first_not_of(" \t"));
    cur.erase(cur.find_last_not_of(" \t") + 1);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

fs::path seeded_path(const std::string& output, uint64_t seed) {
  fs::path p(output);
  return p.parent_path() / (p.stem().string() + ".seed" + std::to_string(seed) + p.extension().string());
}

std::vector<std::string> all_variants(int scenario) {
  if (scenario == 1) {
    std::vector<std::string> v;
    for (int i = 1; i <= 10; ++i) v.push_back(std::to_string(i));
    return v;
  }
  return {"A", "B", "C", "D", "E"};
}

}  // namespace

std::vector<uint64_t> parse_int_list(const std::string& text) {
  std::vector<uint64_t> out;
  for (const auto& part : split(text, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_uint(part));
      continue;
    }
    const uint64_t lo = parse_uint(std::string_view(part).substr(0, dots));
    const uint64_t hi = parse_uint(std::string_view(part).substr(dots + 2));
    if (hi < lo) throw InputError("empty range '" + part + "'");
    if (hi - lo > 1000000) throw InputError("range too large '" + part + "'");
    for (uint64_t v = lo; v <= hi; ++v) out.push_back(v);
  }
  if (out.empty()) throw InputError("empty list '" + text + "'");
  return out;
}

DiscoverPlan plan_discover(const DiscoverOptions& o) {
  if (o.config && o.preset) throw InputError("--config and --preset are mutually exclusive");
  DiscoverPlan plan;
  report::RunConfigFile file;
  if (o.config) file = report::load_run_config(*o.config);
  if (file.search) plan.config = *file.search;
  if (o.preset) plan.config = search::preset(*o.preset);
  if (o.iterations) plan.config.iterations = *o.iterations;
  if (o.threshold) plan.config.intr.success_threshold = *o.threshold;
  plan.config.intr.validate();
  plan.config.validate();

  if (o.input) plan.input = *o.input;
  else if (file.input) plan.input = *file.input;
  else throw InputError("missing --input");
  plan.schema = o.schema ? o.schema : file.schema;
  plan.output = o.output ? o.output : file.output;
  plan.format = o.format.value_or(file.format.value_or("json"));
  if (plan.format == "markdown") plan.format = "md";
  if (plan.format != "json" && plan.format != "md") throw InputError("--format must be json or md");

  if (o.seed) plan.seeds = {*o.seed};
  else if (!file.seeds.empty()) plan.seeds = file.seeds;
  else plan.seeds = {plan.config.seed};
  return plan;
}

report::ReportDocument discover(const DiscoverPlan& plan, uint64_t seed, std::ostream* trace, bool wall_time) {
  std::optional<tabular::Schema> schema;
  if (plan.schema) schema = tabular::load_schema(*plan.schema);
  const auto data = tabular::load_csv(plan.input, schema);
  auto cfg = plan.config;
  cfg.seed = seed;
  const auto result = search::run_search(data, cfg, trace);
  return report::make_report(result, cfg, plan.input, wall_time);
}

std::string render(const report::ReportDocument& r, const std::string& format) {
  return format == "md" ? report::to_markdown(r) : report::dump(report::to_json(r));
}

// ---- benchmark ----

synth::GeneratedDataset make_dataset(int scenario, const std::string& variant, uint64_t seed) {
  if (scenario == 1) {
    const uint64_t i = parse_uint(variant);
    if (i < 1 || i > 10) throw InputError("scenario 1 variant must be in 1..10");
    return synth::generate_scenario1(static_cast<int>(i), seed);
  }
  if (scenario == 2) {
    if (variant.size() != 1) throw InputError("scenario 2 variant must be one of A..E");
    const char which = static_cast<char>(std::toupper(static_cast<unsigned char>(variant[0])));
    synth::scenario2_shape(which);
    return synth::generate_scenario2(which, seed);
  }
  throw InputError("--scenario must be 1 or 2");
}

report::json manifest_json(const synth::GeneratedDataset& g, int scenario, const std::string& variant) {
  report::json specs = report::json::array();
  for (const auto& s : g.specs) specs.push_back(report::to_json(s));
  return {{"name", g.name},
          {"scenario", scenario},
          {"variant", variant},
          {"seed", g.seed},
          {"rows", g.dataset.row_count()},
          {"columns", g.dataset.columns().size()},
          {"specs", specs}};
}

void aggregate(BenchmarkSummary& s) {
  s.aggregates.clear();
  s.found_ranks.clear();
  s.count_ranks.clear();
  using Key = std::tuple<std::string, std::string, std::size_t>;
  std::map<Key, std::vector<const BenchmarkCell*>> groups;
  for (const auto& c : s.cells) groups[{c.dataset, c.preset, c.cutoff}].push_back(&c);

  std::map<std::size_t, synth::ScoreTable> found_tables, count_tables;
  for (const auto& [key, cells] : groups) {
    BenchmarkAggregate a;
    std::tie(a.dataset, a.preset, a.cutoff) = key;
    a.seeds = cells.size();
    const std::size_t specs = cells.front()->evaluation.per_spec.size();
    for (std::size_t i = 0; i < specs; ++i) {
      std::vector<double> found, count;
      for (const auto* c : cells) {
        found.push_back(static_cast<double>(c->evaluation.per_spec.at(i).found));
        count.push_back(static_cast<double>(c->evaluation.per_spec.at(i).count));
      }
      a.found += synth::expectation(found);
      a.count += synth::expectation(count);
    }
    std::vector<double> other, total, first;
    for (const auto* c : cells) {
      other.push_back(static_cast<double>(c->evaluation.other_count));
      total.push_back(static_cast<double>(c->evaluation.total));
      if (c->first_found) first.push_back(static_cast<double>(*c->first_found));
    }
    a.other = synth::expectation(other);
    a.total = synth::expectation(total);
    if (!first.empty()) a.mean_first_found = synth::expectation(first);
    found_tables[a.cutoff][{a.preset, a.dataset}] = a.found;
    count_tables[a.cutoff][{a.preset, a.dataset}] = a.count;
    s.aggregates.push_back(a);
  }
  for (const auto& [cutoff, t] : found_tables) s.found_ranks[cutoff] = synth::rank_configurations(t);
  for (const auto& [cutoff, t] : count_tables) s.count_ranks[cutoff] = synth::rank_configurations(t);
}

BenchmarkSummary run_benchmark(const BenchmarkOptions& o, std::ostream* log) {
  if (o.scenario != 1 && o.scenario != 2) throw InputError("--scenario must be 1 or 2");
  if (o.cutoffs.empty() || o.seeds.empty()) throw InputError("cutoffs and seeds must be nonempty");
  const auto datasets = o.datasets.empty() ? all_variants(o.scenario) : o.datasets;
  const auto presets = o.presets.empty() ? search::preset_names() : o.presets;
  for (const auto& p : presets) search::preset(p);
  std::vector<std::size_t> cutoffs = o.cutoffs;
  std::sort(cutoffs.begin(), cutoffs.end());
  cutoffs.erase(std::unique(cutoffs.begin(), cutoffs.end()), cutoffs.end());

  BenchmarkSummary summary;
  summary.scenario = o.scenario;
  std::vector<synth::GeneratedDataset> generated;
  for (const auto& v : datasets) generated.push_back(make_dataset(o.scenario, v, o.data_seed));

  const std::optional<fs::path> out = o.output ? std::optional<fs::path>(*o.output) : std::nullopt;
  if (out) {
    for (std::size_t i = 0; i < generated.size(); ++i) {
      const auto& g = generated[i];
      const fs::path dir = *out / "datasets";
      tabular::write_csv(g.dataset, (fs::create_directories(dir), dir / (g.name + ".csv")));
      write_file(dir / (g.name + ".schema.json"), tabular::schema_to_json(g.dataset));
      write_file(dir / (g.name + ".manifest.json"),
                 report::dump(manifest_json(g, o.scenario, datasets[i])));
    }
  }

  for (const auto& g : generated) {
    for (const auto& preset_name : presets) {
      for (const uint64_t seed : o.seeds) {
        auto cfg = search::preset(preset_name);
        cfg.seed = seed;
        cfg.iterations = cutoffs.back();
        search::Search search(g.dataset, cfg);
        std::size_t done = 0;
        for (const std::size_t cutoff : cutoffs) {
          search.run(cutoff - done);
          done = cutoff;
          auto cell_cfg = cfg;
          cell_cfg.iterations = cutoff;
          BenchmarkCell cell;
          cell.dataset = g.name;
          cell.preset = preset_name;
          cell.seed = seed;
          cell.cutoff = cutoff;
          cell.report = report::make_report(search.result(), cell_cfg, g.name + ".csv");
          cell.evaluation = synth::evaluate_run(cell.report.patterns, g.specs);
          for (const auto& p : cell.report.patterns) {
            const bool hit = std::any_of(g.specs.begin(), g.specs.end(), [&](const auto& s) { return s.matches(p); });
            if (hit && (!cell.first_found || p.discovery_iteration < *cell.first_found)) {
              cell.first_found = p.discovery_iteration;
            }
          }
          if (out) {
            const auto name = g.name + "_" + preset_name + "_seed" + std::to_string(seed) + "_iter" +
                              std::to_string(cutoff) + ".json";
            write_file(*out / "cells" / name, report::dump(report::to_json(cell.report)));
          }
          summary.cells.push_back(std::move(cell));
        }
        if (log) {
          *log << g.name << " " << preset_name << " seed " << seed << ": " << search.result().patterns.size()
               << " patterns\n";
        }
      }
    }
  }
  aggregate(summary);
  if (out) {
    write_file(*out / "summary.json", report::dump(to_json(summary)));
    write_file(*out / "summary.md", to_markdown(summary));
  }
  return summary;
}

report::json to_json(const BenchmarkSummary& s) {
  report::json aggs = report::json::array();
  for (const auto& a : s.aggregates) {
    report::json j = {{"dataset", a.dataset}, {"preset", a.preset}, {"cutoff", a.cutoff},
                      {"found", a.found},     {"count", a.count},   {"other", a.other},
                      {"total", a.total},     {"seeds", a.seeds}};
    if (a.mean_first_found) j["meanFirstFound"] = *a.mean_first_found;
    aggs.push_back(j);
  }
  auto ranks = [](const auto& m) {
    report::json j = report::json::object();
    for (const auto& [cutoff, r] : m) j[std::to_string(cutoff)] = r;
    return j;
  };
  return {{"schemaVersion", report::kSchemaVersion},
          {"scenario", s.scenario},
          {"cells", s.cells.size()},
          {"aggregates", aggs},
          {"foundRanks", ranks(s.found_ranks)},
          {"countRanks", ranks(s.count_ranks)}};
}

std::string to_markdown(const BenchmarkSummary& s) {
  std::ostringstream out;
  out << "# Benchmark (scenario " << s.scenario << ", " << s.cells.size() << " runs)\n\n";
  out << "| Dataset | Preset | Cutoff | E[found] | E[count] | E[other] | E[total] | First found |\n";
  out << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& a : s.aggregates) {
    out << "| " << a.dataset << " | " << a.preset << " | " << a.cutoff << " | " << fixed(a.found, 2) << " | "
        << fixed(a.count, 2) << " | " << fixed(a.other, 2) << " | " << fixed(a.total, 2) << " | "
        << (a.mean_first_found ? fixed(*a.mean_first_found, 1) : std::string("-")) << " |\n";
  }
  auto table = [&](const char* title, const auto& m) {
    out << "\n## Average rank by " << title << "\n\n| Preset |";
    for (const auto& [cutoff, _] : m) out << " " << cutoff << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < m.size(); ++i) out << "---|";
    out << "\n";
    if (m.empty()) return;
    for (const auto& [preset, _] : m.begin()->second) {
      out << "| " << preset << " |";
      for (const auto& [cutoff, r] : m) out << " " << fixed(r.at(preset), 2) << " |";
      out << "\n";
    }
  };
  table("found", s.found_ranks);
  table("count", s.count_ranks);
  return out.str();
}

// ---- generate ----

std::vector<std::string> generate(const GenerateOptions& o) {
  const auto g = make_dataset(o.scenario, o.variant, o.seed);
  const fs::path dir(o.output);
  fs::create_directories(dir);
  const fs::path csv = dir / (g.name + ".csv");
  const fs::path schema = dir / (g.name + ".schema.json");
  const fs::path manifest = dir / (g.name + ".manifest.json");
  tabular::write_csv(g.dataset, csv);
  write_file(schema, tabular::schema_to_json(g.dataset));
  write_file(manifest, report::dump(manifest_json(g, o.scenario, o.variant)));
  return {csv.string(), schema.string(), manifest.string()};
}

// ---- entry point ----

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Automated insight discovery over tabular data", "insight"};
  app.require_subcommand(1);

  DiscoverOptions d;
  std::string d_input, d_schema, d_config, d_preset, d_output, d_format, d_trace;
  std::size_t d_iterations = 0;
  uint64_t d_seed = 0;
  double d_threshold = 0.5;
  auto* disc = app.add_subcommand("discover", "Search a CSV file for interesting patterns");
  auto* o_input = disc->add_option("--input", d_input, "CSV file");
  auto* o_schema = disc->add_option("--schema", d_schema, "Sidecar schema JSON");
  auto* o_config = disc->add_option("--config", d_config, "Run configuration JSON");
  auto* o_preset = disc->add_option("--preset", d_preset, "Preset C1..C10");
  auto* o_iter = disc->add_option("--iterations", d_iterations, "Search iterations");
  auto* o_seed = disc->add_option("--seed", d_seed, "Random seed");
  auto* o_thr = disc->add_option("--threshold", d_threshold, "Success threshold");
  auto* o_out = disc->add_option("--output", d_output, "Report path (default stdout)");
  auto* o_fmt = disc->add_option("--format", d_format, "json or md");
  auto* o_trace = disc->add_option("--trace", d_trace, "Per-iteration JSON-lines trace");
  disc->add_flag("--wall-time", d.wall_time, "Record wall time in the report");
  o_config->excludes(o_preset);

  BenchmarkOptions b;
  std::string b_datasets, b_presets, b_cutoffs, b_seeds, b_output;
  auto* bench = app.add_subcommand("benchmark", "Run presets over the synthetic benchmark");
  bench->add_option("--scenario", b.scenario, "1 or 2")->required();
  auto* ob_ds = bench->add_option("--datasets", b_datasets, "Datasets: 1..10 (scenario 1) or A,B,.. (scenario 2)");
  auto* ob_pr = bench->add_option("--presets", b_presets, "Comma-separated presets");
  auto* ob_cut = bench->add_option("--cutoffs", b_cutoffs, "Iteration cut-offs");
  auto* ob_seed = bench->add_option("--seeds", b_seeds, "Seeds, e.g. 1..10");
  bench->add_option("--data-seed", b.data_seed, "Seed for dataset generation");
  auto* ob_out = bench->add_option("--output", b_output, "Output directory");

  GenerateOptions g;
  auto* gen = app.add_subcommand("generate", "Write a synthetic dataset with its schema and manifest");
  gen->add_option("--scenario", g.scenario, "1 or 2")->required();
  gen->add_option("--variant", g.variant, "1..10 or A..E")->required();
  gen->add_option("--seed", g.seed, "Generator seed");
  gen->add_option("--output", g.output, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (disc->parsed()) {
      if (o_input->count()) d.input = d_input;
      if (o_schema->count()) d.schema = d_schema;
      if (o_config->count()) d.config = d_config;
      if (o_preset->count()) d.preset = d_preset;
      if (o_iter->count()) d.iterations = d_iterations;
      if (o_seed->count()) d.seed = d_seed;
      if (o_thr->count()) d.threshold = d_threshold;
      if (o_out->count()) d.output = d_output;
      if (o_fmt->count()) d.format = d_format;
      if (o_trace->count()) d.trace = d_trace;
      const auto plan = plan_discover(d);
      std::ofstream trace_file;
      if (d.trace) {
        trace_file.open(*d.trace);
        if (!trace_file) throw InputError("cannot write trace '" + *d.trace + "'");
      }
      for (const uint64_t seed : plan.seeds) {
        const auto doc = discover(plan, seed, d.trace ? &trace_file : nullptr, d.wall_time);
        const auto text = render(doc, plan.format);
        if (!plan.output) out << text;
        else if (plan.seeds.size() == 1) write_file(*plan.output, text);
        else write_file(seeded_path(*plan.output, seed), text);
      }
    } else if (bench->parsed()) {
      if (ob_ds->count()) {
        if (b.scenario == 1) {
          for (auto v : parse_int_list(b_datasets)) b.datasets.push_back(std::to_string(v));
        } else {
          b.datasets = split(b_datasets, ',');
        }
      }
      if (ob_pr->count()) b.presets = split(b_presets, ',');
      if (ob_cut->count()) {
        b.cutoffs.clear();
        for (auto v : parse_int_list(b_cutoffs)) b.cutoffs.push_back(static_cast<std::size_t>(v));
      }
      if (ob_seed->count()) b.seeds = parse_int_list(b_seeds);
      if (ob_out->count()) b.output = b_output;
      const auto summary = run_benchmark(b, &err);
      out << to_markdown(summary);
    } else if (gen->parsed()) {
      for (const auto& path : generate(g)) out << path << "\n";
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace insight::cli
