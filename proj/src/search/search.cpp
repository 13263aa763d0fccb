#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "insight/error.hpp"
#include "insight/search.hpp"
#include "json.hpp"

namespace insight::search {
namespace {

constexpr std::pair<TreePolicy, std::string_view> kTreePolicies[] = {
    {TreePolicy::Random, "random"}, {TreePolicy::Uct, "uct"}, {TreePolicy::SpUct, "spuct"}, {TreePolicy::Uct2, "uct2"}};
constexpr std::pair<ExpansionMode, std::string_view> kExpansions[] = {
    {ExpansionMode::ProgressiveWidening, "progressive-widening"}, {ExpansionMode::FixedFanOut, "fixed-fan-out"}};
constexpr std::pair<Backprop, std::string_view> kBackprops[] = {{Backprop::Mean, "mean"}, {Backprop::Rms, "rms"}};

template <typename E, std::size_t N>
std::string_view name_of(const std::pair<E, std::string_view> (&table)[N], E v) {
  for (const auto& [e, s] : table) {
    if (e == v) return s;
  }
  return "unknown";
}

std::string lowered(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

template <typename E, std::size_t N>
std::optional<E> parse_of(const std::pair<E, std::string_view> (&table)[N], std::string_view s) {
  const std::string l = lowered(s);
  for (const auto& [e, name] : table) {
    if (name == l) return e;
  }
  return std::nullopt;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

std::string_view to_string(TreePolicy p) { return name_of(kTreePolicies, p); }
std::string_view to_string(ExpansionMode m) { return name_of(kExpansions, m); }
std::string_view to_string(Backprop b) { return name_of(kBackprops, b); }

std::optional<TreePolicy> parse_tree_policy(std::string_view s) { return parse_of(kTreePolicies, s); }
std::optional<ExpansionMode> parse_expansion(std::string_view s) {
  if (lowered(s) == "pw") return ExpansionMode::ProgressiveWidening;
  if (lowered(s) == "fan-out" || lowered(s) == "fanout") return ExpansionMode::FixedFanOut;
  return parse_of(kExpansions, s);
}
std::optional<Backprop> parse_backprop(std::string_view s) { return parse_of(kBackprops, s); }

std::optional<actions::ParamPolicy> parse_param_policy(std::string_view s) {
  const std::string l = lowered(s);
  if (l == "random") return actions::ParamPolicy::Random;
  if (l == "weighted-random" || l == "weightedrandom" || l == "weighted") return actions::ParamPolicy::WeightedRandom;
  if (l == "uct") return actions::ParamPolicy::Uct;
  return std::nullopt;
}

void SearchConfig::validate() const {
  if (expansion == ExpansionMode::ProgressiveWidening && !(alpha > 0.0 && alpha < 1.0)) {
    throw InputError("alpha must lie in (0,1)");
  }
  if (expansion == ExpansionMode::FixedFanOut && fan_out < 1) throw InputError("fan-out must be at least 1");
  if (!(c >= 0.0) || !std::isfinite(c)) throw InputError("exploration constant C must be non-negative");
  if (!(d_const >= 0.0) || !std::isfinite(d_const)) throw InputError("spUCT constant D must be non-negative");
  if (min_rows < 1) throw InputError("min_rows must be at least 1");
  intr.validate();
}

SearchConfig preset(std::string_view name) {
  const std::string n = lowered(name);
  SearchConfig c;
  c.name = "C" + (n.size() > 1 ? n.substr(1) : std::string());
  auto set = [&](TreePolicy tp, actions::ParamPolicy ap, bool rs, bool pw, double alpha, std::size_t fan) {
    c.tree_policy = tp;
    c.action_policy = ap;
    c.random_simulation = rs;
    c.expansion = pw ? ExpansionMode::ProgressiveWidening : ExpansionMode::FixedFanOut;
    c.alpha = pw ? alpha : 0.5;
    c.fan_out = fan;
  };
  using P = actions::ParamPolicy;
  if (n == "c1") set(TreePolicy::Random, P::Random, true, true, 0.5, 3);
  else if (n == "c2") set(TreePolicy::Uct, P::Random, true, true, 0.5, 3);
  else if (n == "c3") set(TreePolicy::Uct, P::Random, false, true, 0.5, 3);
  else if (n == "c4") set(TreePolicy::Uct, P::WeightedRandom, false, true, 0.5, 3);
  else if (n == "c5") set(TreePolicy::Uct, P::Uct, false, true, 0.25, 3);
  else if (n == "c6") set(TreePolicy::Uct, P::Uct, false, true, 0.5, 3);
  else if (n == "c7") set(TreePolicy::Uct, P::Uct, false, true, 0.75, 3);
  else if (n == "c8") set(TreePolicy::Uct, P::Uct, false, false, 0.5, 3);
  else if (n == "c9") set(TreePolicy::Uct, P::Uct, false, false, 0.5, 6);
  else if (n == "c10") set(TreePolicy::SpUct, P::Uct, false, true, 0.5, 3);
  else throw InputError("unknown preset '" + std::string(name) + "' (expected C1..C10)");
  return c;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (int i = 1; i <= 10; ++i) out.push_back("C" + std::to_string(i));
  return out;
}

double RewardStats::variance() const {
  if (visits == 0) return 0.0;
  const double n = static_cast<double>(visits);
  return std::max(0.0, reward_sq_sum / n - (reward_sum / n) * (reward_sum / n));
}

double aggregate(const RewardStats& s, Backprop b) {
  if (s.visits == 0) return 0.0;
  const double n = static_cast<double>(s.visits);
  return clamp01(b == Backprop::Mean ? s.reward_sum / n : std::sqrt(s.reward_sq_sum / n));
}

bool Node::has_active_template() const {
  return std::find(template_active.begin(), template_active.end(), true) != template_active.end();
}

bool expansion_gate_open(std::size_t visits, std::size_t children, const SearchConfig& cfg) {
  if (cfg.expansion == ExpansionMode::FixedFanOut) return children < cfg.fan_out;
  // The epsilon keeps exact powers (4^0.5, 16^0.25) from rounding down.
  const double widened = std::floor(std::pow(static_cast<double>(visits), cfg.alpha) + 1e-9);
  return widened >= static_cast<double>(children);
}

double edge_score(const Node& parent, const Edge& e, const SearchConfig& cfg) {
  if (e.stats.visits == 0) return std::numeric_limits<double>::infinity();
  const double n_s = static_cast<double>(std::max<std::size_t>(parent.stats.visits, 1));
  const double n_a = static_cast<double>(e.stats.visits);
  double q = aggregate(e.stats, cfg.backprop);
  if (cfg.tree_policy == TreePolicy::Uct2 && e.child) q = e.child->q(cfg.backprop);
  double score = q + cfg.c * std::sqrt(std::log(n_s) / n_a);
  if (cfg.tree_policy == TreePolicy::SpUct) score += std::sqrt(e.stats.variance() + cfg.d_const / n_a);
  return score;
}

std::size_t select_child(const Node& n, const SearchConfig& cfg, Rng& rng) {
  std::vector<std::size_t> open;
  for (std::size_t i = 0; i < n.edges.size(); ++i) {
    if (n.edges[i].child && !n.edges[i].child->exhausted) open.push_back(i);
  }
  if (open.empty()) throw PreconditionError("select_child: no selectable child");
  if (cfg.tree_policy == TreePolicy::Random) {
    std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
    return open[pick(rng)];
  }
  for (std::size_t i : open) {
    if (n.edges[i].stats.visits == 0) return i;
  }
  std::size_t best = open.front();
  double best_score = edge_score(n, n.edges[best], cfg);
  for (std::size_t k = 1; k < open.size(); ++k) {
    const std::size_t i = open[k];
    const double s = edge_score(n, n.edges[i], cfg);
    const auto& e = n.edges[i];
    const auto& b = n.edges[best];
    bool better = s > best_score;
    if (s == best_score) {
      better = e.stats.visits < b.stats.visits ||
               (e.stats.visits == b.stats.visits && e.action.canonical() < b.action.canonical());
    }
    if (better) {
      best = i;
      best_score = s;
    }
  }
  return best;
}

Search::Search(const Dataset& d0, SearchConfig cfg, std::ostream* trace)
    : cfg_(std::move(cfg)), trace_(trace), rng_(cfg_.seed) {
  cfg_.validate();
  auto root_data = std::make_shared<const Dataset>(d0.empty_view());
  root_ = make_node(actions::canonical_state_key(*root_data), root_data, nullptr, {});
  // The root's own evaluation counts as its first visit.
  root_->stats.add(0.0);
}

Node* Search::make_node(const Fingerprint& key, std::shared_ptr<const Dataset> d,
                        std::shared_ptr<const mining::FittedModel> m, std::vector<std::string> path) {
  auto node = std::make_unique<Node>();
  node->key = key;
  node->dataset = std::move(d);
  node->model = std::move(m);
  node->path = std::move(path);
  node->created_iteration = iteration_;
  node->taken.insert(node->path.begin(), node->path.end());
  Node* raw = node.get();
  table_.emplace(key, std::move(node));
  return raw;
}

Node* Search::find(const Fingerprint& key) {
  auto it = table_.find(key);
  return it == table_.end() ? nullptr : it->second.get();
}

void Search::prepare_templates(Node& n) {
  if (n.templates_ready) return;
  actions::TemplateOptions opts;
  opts.allowed = cfg_.allowed_kinds;
  n.templates = actions::enumerate_templates(*n.dataset, opts);
  n.template_active.assign(n.templates.size(), true);
  n.templates_ready = true;
}

double Search::simulate(Node& n) {
  if (n.model) return clamp01(intr::interestingness(*n.model, cfg_.intr));
  if (cfg_.random_simulation) return std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
  if (n.dataset->columns().empty()) return 0.0;
  return clamp01(intr::simulate_score(*n.dataset, cfg_.intr).total);
}

std::optional<std::size_t> Search::add_child(Node& parent, const GroundAction& a) {
  parent.taken.insert(a.canonical());
  std::vector<std::string> path = parent.path;
  path.push_back(a.canonical());

  Node* child = nullptr;
  if (actions::is_data_action(a.kind())) {
    auto next = std::make_shared<const Dataset>(actions::apply_data_action(*parent.dataset, a));
    const Fingerprint key = actions::canonical_state_key(*next);
    child = find(key);
    if (!child) {
      child = make_node(key, std::move(next), nullptr, std::move(path));
      child->base_score = simulate(*child);
    }
  } else {
    ++model_actions_;
    const Fingerprint key = actions::canonical_state_key(*parent.dataset, a.canonical());
    child = find(key);
    if (!child) {
      mining::MiningParams params;
      params.t_quant = cfg_.intr.t_quant;
      params.t_qual = cfg_.intr.t_qual;
      mining::ModelOutcome outcome;
      try {
        outcome = mining::apply_model_action(*parent.dataset, a, params);
      } catch (const MiningError&) {
        return std::nullopt;
      } catch (const PreconditionError&) {
        return std::nullopt;
      }
      auto model = std::make_shared<const mining::FittedModel>(std::move(outcome.model));
      child = make_node(key, std::make_shared<const Dataset>(std::move(outcome.dataset)), model, path);
      child->base_score = simulate(*child);
      if (child->base_score > cfg_.intr.success_threshold && reported_.insert(key).second) {
        Pattern p = mining::render_pattern(*model, child->base_score, *parent.dataset, path);
        p.discovery_iteration = iteration_;
        patterns_.push_back(std::move(p));
      }
    }
  }
  parent.edges.push_back({a, child, {}});
  return parent.edges.size() - 1;
}

std::optional<std::size_t> Search::expand(Node& n, bool& fit_failed) {
  fit_failed = false;
  prepare_templates(n);
  actions::PolicyParams policy;
  policy.policy = cfg_.action_policy;
  policy.exploration = cfg_.c;
  actions::PreconditionContext ctx;
  ctx.taken = &n.taken;
  ctx.min_rows = cfg_.min_rows;
  while (n.has_active_template()) {
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < n.templates.size(); ++i) {
      if (n.template_active[i]) active.push_back(i);
    }
    const std::size_t t = active[std::uniform_int_distribution<std::size_t>(0, active.size() - 1)(rng_)];
    const auto action = actions::instantiate(n.templates[t], *n.dataset, policy, param_stats_, rng_, ctx);
    if (!action) {
      n.template_active[t] = false;
      continue;
    }
    const auto edge = add_child(n, *action);
    if (!edge) fit_failed = true;
    return edge;
  }
  return std::nullopt;
}

void Search::refresh_exhausted(Node& n) {
  if (!n.templates_ready || n.has_active_template()) {
    n.exhausted = false;
    return;
  }
  n.exhausted = std::all_of(n.edges.begin(), n.edges.end(),
                            [](const Edge& e) { return !e.child || e.child->exhausted; });
}

void Search::backpropagate(const std::vector<Node*>& nodes, const std::vector<std::size_t>& edges, double reward) {
  reward = clamp01(reward);
  for (Node* n : nodes) n->stats.add(reward);
  for (std::size_t i = 0; i < edges.size(); ++i) nodes[i]->edges[edges[i]].stats.add(reward);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const double delta = nodes[i + 1]->q(cfg_.backprop) - nodes[i]->q(cfg_.backprop);
    param_stats_.record(nodes[i]->edges[edges[i]].action, delta);
  }
  for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) refresh_exhausted(**it);
}

void Search::trace_line(const std::vector<Node*>& nodes, const std::string& kind, double reward, bool created) {
  if (!trace_) return;
  nlohmann::json j;
  j["iteration"] = iteration_;
  j["path"] = nodes.back()->path;
  j["kind"] = kind;
  j["reward"] = reward;
  j["new"] = created;
  j["root_visits"] = root_->stats.visits;
  j["root_children"] = root_->edges.size();
  (*trace_) << j.dump() << '\n';
}

void Search::step() {
  const auto start = std::chrono::steady_clock::now();
  ++iteration_;
  std::vector<Node*> nodes{root_};
  std::vector<std::size_t> edges;
  std::string kind = "none";
  double reward = 0.0;
  bool created = false;

  while (true) {
    Node& n = *nodes.back();
    prepare_templates(n);
    const bool can_select = std::any_of(n.edges.begin(), n.edges.end(),
                                        [](const Edge& e) { return e.child && !e.child->exhausted; });
    if (n.has_active_template() && (!can_select || expansion_gate_open(n.stats.visits, n.edges.size(), cfg_))) {
      const std::size_t before = table_.size();
      bool fit_failed = false;
      const auto edge = expand(n, fit_failed);
      if (edge) {
        Edge& e = n.edges[*edge];
        kind = std::string(actions::to_string(e.action.kind()));
        created = table_.size() > before;
        reward = e.child->base_score;
        edges.push_back(*edge);
        nodes.push_back(e.child);
        if (std::count(nodes.begin(), nodes.end() - 1, e.child) > 0) {
          // A transposition closed a cycle: stop at the repeated state.
          nodes.pop_back();
          edges.pop_back();
        }
        break;
      }
      if (fit_failed) {
        kind = "fit-failed";
        break;
      }
      refresh_exhausted(n);
      if (!can_select) {
        reward = n.base_score;
        break;
      }
    }
    if (!can_select) {
      reward = n.base_score;
      kind = "leaf";
      break;
    }
    const std::size_t i = select_child(n, cfg_, rng_);
    Node* child = n.edges[i].child;
    if (std::find(nodes.begin(), nodes.end(), child) != nodes.end()) {
      reward = child->base_score;
      kind = "cycle";
      break;
    }
    edges.push_back(i);
    nodes.push_back(child);
  }
  backpropagate(nodes, edges, reward);
  trace_line(nodes, kind, reward, created);
  elapsed_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void Search::run(std::size_t iterations) {
  for (std::size_t i = 0; i < iterations; ++i) step();
}

SearchResult Search::result() const {
  SearchResult r;
  r.patterns = patterns_;
  r.iterations = iteration_;
  r.node_count = table_.size();
  r.model_action_count = model_actions_;
  r.wall_time = elapsed_;
  return r;
}

SearchResult run_search(const Dataset& d0, const SearchConfig& cfg, std::ostream* trace) {
  Search s(d0, cfg, trace);
  s.run(cfg.iterations);
  return s.result();
}

ReplayedState replay(const Dataset& d0, const std::vector<std::string>& lineage) {
  ReplayedState st{d0.empty_view(), nullptr};
  for (const auto& text : lineage) {
    const GroundAction a = actions::parse_action(text);
    if (actions::is_data_action(a.kind())) {
      st.dataset = actions::apply_data_action(st.dataset, a);
      st.model.reset();
    } else {
      auto outcome = mining::apply_model_action(st.dataset, a);
      st.model = std::make_shared<const mining::FittedModel>(std::move(outcome.model));
      st.dataset = std::move(outcome.dataset);
    }
  }
  return st;
}

bool PatternDescriptor::matches(const Pattern& p) const {
  if (!model_kinds.empty() && std::find(model_kinds.begin(), model_kinds.end(), p.model_kind) == model_kinds.end()) {
    return false;
  }
  for (const auto& b : base_columns) {
    if (std::find(p.base_columns.begin(), p.base_columns.end(), b) == p.base_columns.end()) return false;
  }
  for (const auto& [k, v] : required_metrics) {
    auto it = p.metrics.find(k);
    if (it == p.metrics.end() || std::abs(it->second - v) > 1e-9) return false;
  }
  return true;
}

std::vector<PatternMetrics> collect_metrics(const SearchResult& result,
                                            const std::vector<PatternDescriptor>& expected) {
  std::vector<PatternMetrics> out(expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    for (const auto& p : result.patterns) {
      if (expected[i].matches(p)) ++out[i].count;
    }
    out[i].found = std::min<std::size_t>(out[i].count, 1);
  }
  return out;
}

}  // namespace insight::search
