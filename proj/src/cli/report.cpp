#include "insight/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "insight/error.hpp"

namespace insight::report {
namespace {

void reject_unknown(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw InputError(where + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
T read(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(where + ": bad value for '" + key + "': " + e.what());
  }
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string md_escape(std::string s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += "\\|";
    else out += c;
  }
  return out;
}

}  // namespace

json to_json(const mining::Pattern& p) {
  return {{"summary", p.summary},
          {"interestingness", p.interestingness},
          {"modelKind", p.model_kind},
          {"statePath", p.state_path},
          {"stateKey", p.state_key},
          {"baseColumns", p.base_columns},
          {"targetBase", p.target_base},
          {"metrics", p.metrics},
          {"discoveryIteration", p.discovery_iteration}};
}

mining::Pattern pattern_from_json(const json& j) {
  const std::string where = "pattern";
  reject_unknown(j, {"summary", "interestingness", "modelKind", "statePath", "stateKey", "baseColumns", "targetBase",
                     "metrics", "discoveryIteration"},
                 where);
  mining::Pattern p;
  p.summary = read<std::string>(j, "summary", where);
  p.interestingness = read<double>(j, "interestingness", where);
  p.model_kind = read<std::string>(j, "modelKind", where);
  p.state_path = read<std::vector<std::string>>(j, "statePath", where);
  p.state_key = read<std::string>(j, "stateKey", where);
  p.base_columns = read<std::vector<std::string>>(j, "baseColumns", where);
  p.target_base = read<std::string>(j, "targetBase", where);
  p.metrics = read<std::map<std::string, double>>(j, "metrics", where);
  p.discovery_iteration = read<std::size_t>(j, "discoveryIteration", where);
  return p;
}

json to_json(const intr::IntrConfig& c) {
  return {{"tQual", c.t_qual},
          {"tQuant", c.t_quant},
          {"corrGate", c.corr_gate},
          {"modeGate", c.mode_gate},
          {"successThreshold", c.success_threshold}};
}

intr::IntrConfig intr_from_json(const json& j, intr::IntrConfig base) {
  const std::string where = "intr config";
  reject_unknown(j, {"tQual", "tQuant", "corrGate", "modeGate", "successThreshold"}, where);
  if (j.contains("tQual")) base.t_qual = read<double>(j, "tQual", where);
  if (j.contains("tQuant")) base.t_quant = read<double>(j, "tQuant", where);
  if (j.contains("corrGate")) base.corr_gate = read<double>(j, "corrGate", where);
  if (j.contains("modeGate")) base.mode_gate = read<double>(j, "modeGate", where);
  if (j.contains("successThreshold")) base.success_threshold = read<double>(j, "successThreshold", where);
  base.validate();
  return base;
}

json to_json(const search::SearchConfig& c) {
  std::vector<std::string> kinds;
  for (auto k : c.allowed_kinds) kinds.emplace_back(actions::to_string(k));
  json j = {{"name", c.name},
            {"treePolicy", std::string(search::to_string(c.tree_policy))},
            {"actionPolicy", std::string(actions::to_string(c.action_policy))},
            {"randomSimulation", c.random_simulation},
            {"expansion", std::string(search::to_string(c.expansion))},
            {"alpha", c.alpha},
            {"fanOut", c.fan_out},
            {"c", c.c},
            {"d", c.d_const},
            {"backprop", std::string(search::to_string(c.backprop))},
            {"iterations", c.iterations},
            {"seed", c.seed},
            {"intr", to_json(c.intr)},
            {"allowedKinds", kinds},
            {"minRows", c.min_rows}};
  return j;
}

search::SearchConfig search_config_from_json(const json& j) {
  const std::string where = "search config";
  reject_unknown(j,
                 {"preset", "name", "treePolicy", "actionPolicy", "randomSimulation", "expansion", "alpha", "fanOut",
                  "c", "d", "backprop", "iterations", "seed", "intr", "allowedKinds", "minRows"},
                 where);
  search::SearchConfig c;
  if (j.contains("preset")) c = search::preset(read<std::string>(j, "preset", where));
  if (j.contains("name")) c.name = read<std::string>(j, "name", where);
  if (j.contains("treePolicy")) {
    const auto v = search::parse_tree_policy(read<std::string>(j, "treePolicy", where));
    if (!v) throw InputError(where + ": unknown treePolicy");
    c.tree_policy = *v;
  }
  if (j.contains("actionPolicy")) {
    const auto v = search::parse_param_policy(read<std::string>(j, "actionPolicy", where));
    if (!v) throw InputError(where + ": unknown actionPolicy");
    c.action_policy = *v;
  }
  if (j.contains("randomSimulation")) c.random_simulation = read<bool>(j, "randomSimulation", where);
  if (j.contains("expansion")) {
    const auto v = search::parse_expansion(read<std::string>(j, "expansion", where));
    if (!v) throw InputError(where + ": unknown expansion");
    c.expansion = *v;
  }
  if (j.contains("alpha")) c.alpha = read<double>(j, "alpha", where);
  if (j.contains("fanOut")) c.fan_out = read<std::size_t>(j, "fanOut", where);
  if (j.contains("c")) c.c = read<double>(j, "c", where);
  if (j.contains("d")) c.d_const = read<double>(j, "d", where);
  if (j.contains("backprop")) {
    const auto v = search::parse_backprop(read<std::string>(j, "backprop", where));
    if (!v) throw InputError(where + ": unknown backprop");
    c.backprop = *v;
  }
  if (j.contains("iterations")) c.iterations = read<std::size_t>(j, "iterations", where);
  if (j.contains("seed")) c.seed = read<uint64_t>(j, "seed", where);
  if (j.contains("intr")) c.intr = intr_from_json(j.at("intr"), c.intr);
  if (j.contains("allowedKinds")) {
    c.allowed_kinds.clear();
    for (const auto& k : read<std::vector<std::string>>(j, "allowedKinds", where)) {
      const auto v = actions::parse_action_kind(k);
      if (!v) throw InputError(where + ": unknown action kind '" + k + "'");
      c.allowed_kinds.insert(*v);
    }
  }
  if (j.contains("minRows")) c.min_rows = read<std::size_t>(j, "minRows", where);
  c.validate();
  return c;
}

json to_json(const search::PatternDescriptor& d) {
  return {{"name", d.name},
          {"modelKinds", d.model_kinds},
          {"baseColumns", d.base_columns},
          {"requiredMetrics", d.required_metrics}};
}

search::PatternDescriptor descriptor_from_json(const json& j) {
  const std::string where = "pattern descriptor";
  reject_unknown(j, {"name", "modelKinds", "baseColumns", "requiredMetrics"}, where);
  search::PatternDescriptor d;
  d.name = read<std::string>(j, "name", where);
  d.model_kinds = read<std::vector<std::string>>(j, "modelKinds", where);
  d.base_columns = read<std::vector<std::string>>(j, "baseColumns", where);
  d.required_metrics = read<std::map<std::string, double>>(j, "requiredMetrics", where);
  return d;
}

json to_json(const synth::PlantedPatternSpec& s) {
  json matchers = json::array();
  for (const auto& m : s.matchers) matchers.push_back(to_json(m));
  return {{"name", s.name},
          {"kind", std::string(synth::to_string(s.kind))},
          {"involvedColumns", s.involved_columns},
          {"parameters", s.parameters},
          {"matchers", matchers}};
}

synth::PlantedPatternSpec spec_from_json(const json& j) {
  const std::string where = "planted pattern";
  reject_unknown(j, {"name", "kind", "involvedColumns", "parameters", "matchers"}, where);
  synth::PlantedPatternSpec s;
  s.name = read<std::string>(j, "name", where);
  const auto kind = synth::parse_plant_kind(read<std::string>(j, "kind", where));
  if (!kind) throw InputError(where + ": unknown kind");
  s.kind = *kind;
  s.involved_columns = read<std::vector<std::string>>(j, "involvedColumns", where);
  s.parameters = read<std::map<std::string, std::string>>(j, "parameters", where);
  for (const auto& m : j.at("matchers")) s.matchers.push_back(descriptor_from_json(m));
  return s;
}

bool ReportDocument::operator==(const ReportDocument& o) const {
  return schema_version == o.schema_version && to_json(run.config) == to_json(o.run.config) &&
         run.input == o.run.input && run.iterations == o.run.iterations && run.node_count == o.run.node_count &&
         run.model_action_count == o.run.model_action_count && run.wall_time == o.run.wall_time &&
         patterns == o.patterns;
}

ReportDocument make_report(const search::SearchResult& r, const search::SearchConfig& cfg, std::string input,
                           bool include_wall_time) {
  ReportDocument doc;
  doc.run.config = cfg;
  doc.run.input = std::move(input);
  doc.run.iterations = r.iterations;
  doc.run.node_count = r.node_count;
  doc.run.model_action_count = r.model_action_count;
  if (include_wall_time) doc.run.wall_time = r.wall_time;
  doc.patterns = r.patterns;
  std::stable_sort(doc.patterns.begin(), doc.patterns.end(), [](const auto& a, const auto& b) {
    if (a.interestingness != b.interestingness) return a.interestingness > b.interestingness;
    if (a.discovery_iteration != b.discovery_iteration) return a.discovery_iteration < b.discovery_iteration;
    return a.state_key < b.state_key;
  });
  return doc;
}

json to_json(const ReportDocument& r) {
  json run = {{"config", to_json(r.run.config)},
              {"input", r.run.input},
              {"iterations", r.run.iterations},
              {"nodeCount", r.run.node_count},
              {"modelActionCount", r.run.model_action_count}};
  if (r.run.wall_time) run["wallTime"] = *r.run.wall_time;
  json patterns = json::array();
  for (const auto& p : r.patterns) patterns.push_back(to_json(p));
  return {{"schemaVersion", r.schema_version}, {"run", run}, {"patterns", patterns}};
}

ReportDocument report_from_json(const json& j) {
  const std::string where = "report";
  reject_unknown(j, {"schemaVersion", "run", "patterns"}, where);
  ReportDocument r;
  r.schema_version = read<int>(j, "schemaVersion", where);
  if (r.schema_version != kSchemaVersion) {
    throw InputError("report: unsupported schemaVersion " + std::to_string(r.schema_version));
  }
  const json& run = j.at("run");
  reject_unknown(run, {"config", "input", "iterations", "nodeCount", "modelActionCount", "wallTime"}, "report run");
  r.run.config = search_config_from_json(run.at("config"));
  r.run.input = read<std::string>(run, "input", where);
  r.run.iterations = read<std::size_t>(run, "iterations", where);
  r.run.node_count = read<std::size_t>(run, "nodeCount", where);
  r.run.model_action_count = read<std::size_t>(run, "modelActionCount", where);
  if (run.contains("wallTime")) r.run.wall_time = read<double>(run, "wallTime", where);
  for (const auto& p : j.at("patterns")) r.patterns.push_back(pattern_from_json(p));
  return r;
}

std::string to_markdown(const ReportDocument& r) {
  std::ostringstream out;
  const auto& c = r.run.config;
  out << "# Insight report\n\n";
  out << "| Setting | Value |\n|---|---|\n";
  out << "| Input | " << md_escape(r.run.input) << " |\n";
  out << "| Configuration | " << md_escape(c.name) << " (" << search::to_string(c.tree_policy) << ", "
      << actions::to_string(c.action_policy) << ", "
      << (c.expansion == search::ExpansionMode::ProgressiveWidening ? "alpha " + fixed(c.alpha, 2)
                                                                    : "fan-out " + std::to_string(c.fan_out))
      << ") |\n";
  out << "| Seed | " << c.seed << " |\n";
  out << "| Iterations | " << r.run.iterations << " |\n";
  out << "| Nodes | " << r.run.node_count << " |\n";
  out << "| Model actions | " << r.run.model_action_count << " |\n";
  if (r.run.wall_time) out << "| Wall time (s) | " << fixed(*r.run.wall_time, 3) << " |\n";
  out << "\n## Patterns (" << r.patterns.size() << ")\n\n";
  if (r.patterns.empty()) out << "No pattern exceeded the success threshold.\n";
  for (std::size_t i = 0; i < r.patterns.size(); ++i) {
    const auto& p = r.patterns[i];
    out << i + 1 << ". **" << fixed(p.interestingness, 3) << "** `" << p.model_kind << "`: " << p.summary << "\n";
    out << "   - path: ";
    for (std::size_t k = 0; k < p.state_path.size(); ++k) out << (k ? " -> " : "") << "`" << p.state_path[k] << "`";
    out << "\n   - found at iteration " << p.discovery_iteration << "\n";
  }
  return out.str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

RunConfigFile run_config_from_json(const json& j) {
  const std::string where = "run config";
  reject_unknown(j, {"search", "preset", "intr", "input", "schema", "output", "format", "seeds"}, where);
  RunConfigFile f;
  if (j.contains("search") && j.contains("preset")) {
    throw InputError(where + ": give either 'search' or 'preset', not both");
  }
  if (j.contains("search")) f.search = search_config_from_json(j.at("search"));
  if (j.contains("preset")) f.search = search::preset(read<std::string>(j, "preset", where));
  if (j.contains("intr")) {
    if (!f.search) f.search = search::SearchConfig{};
    f.search->intr = intr_from_json(j.at("intr"), f.search->intr);
  }
  if (j.contains("input")) f.input = read<std::string>(j, "input", where);
  if (j.contains("schema")) f.schema = read<std::string>(j, "schema", where);
  if (j.contains("output")) f.output = read<std::string>(j, "output", where);
  if (j.contains("format")) {
    f.format = read<std::string>(j, "format", where);
    if (*f.format != "json" && *f.format != "md" && *f.format != "markdown") {
      throw InputError(where + ": format must be json or md");
    }
  }
  if (j.contains("seeds")) f.seeds = read<std::vector<uint64_t>>(j, "seeds", where);
  return f;
}

RunConfigFile load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return run_config_from_json(j);
}

}  // namespace insight::report
