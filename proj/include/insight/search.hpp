#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "insight/actions.hpp"
#include "insight/hash.hpp"
#include "insight/interestingness.hpp"
#include "insight/mining.hpp"

namespace insight::search {

using actions::ActionKind;
using actions::GroundAction;
using actions::Rng;
using mining::Pattern;
using tabular::Dataset;

enum class TreePolicy { Random, Uct, SpUct, Uct2 };
enum class ExpansionMode { ProgressiveWidening, FixedFanOut };
enum class Backprop { Mean, Rms };

std::string_view to_string(TreePolicy p);
std::string_view to_string(ExpansionMode m);
std::string_view to_string(Backprop b);
std::optional<TreePolicy> parse_tree_policy(std::string_view s);
std::optional<actions::ParamPolicy> parse_param_policy(std::string_view s);
std::optional<ExpansionMode> parse_expansion(std::string_view s);
std::optional<Backprop> parse_backprop(std::string_view s);

struct SearchConfig {
  std::string name = "custom";
  TreePolicy tree_policy = TreePolicy::Uct;
  actions::ParamPolicy action_policy = actions::ParamPolicy::Random;
  bool random_simulation = false;
  ExpansionMode expansion = ExpansionMode::ProgressiveWidening;
  double alpha = 0.5;
  std::size_t fan_out = 3;
  double c = 1.4142135623730951;
  double d_const = 1.0;
  Backprop backprop = Backprop::Mean;
  std::size_t iterations = 100;
  uint64_t seed = 0;
  intr::IntrConfig intr;
  std::set<ActionKind> allowed_kinds;  // empty = all
  std::size_t min_rows = 5;

  /// Throws InputError for out-of-range values.
  void validate() const;
};

/// Experimental presets C1..C10. Throws InputError for unknown names.
SearchConfig preset(std::string_view name);
std::vector<std::string> preset_names();

/// Visit count with reward and squared-reward sums.
struct RewardStats {
  std::size_t visits = 0;
  double reward_sum = 0.0;
  double reward_sq_sum = 0.0;

  void add(double r) {
    ++visits;
    reward_sum += r;
    reward_sq_sum += r * r;
  }
  double mean() const { return visits ? reward_sum / static_cast<double>(visits) : 0.0; }
  /// Population variance, clamped at 0.
  double variance() const;
};

/// W/N (mean) or sqrt(W2/N) (rms); 0 without visits.
double aggregate(const RewardStats& s, Backprop b);

struct Node;

struct Edge {
  GroundAction action;
  Node* child = nullptr;
  RewardStats stats;
};

struct Node {
  Fingerprint key;
  std::shared_ptr<const Dataset> dataset;
  std::shared_ptr<const mining::FittedModel> model;  // null for data states
  std::vector<std::string> path;                      // canonical forms from the root
  std::vector<Edge> edges;
  RewardStats stats;
  double base_score = 0.0;
  std::size_t created_iteration = 0;

  std::vector<actions::ActionTemplate> templates;
  std::vector<bool> template_active;
  bool templates_ready = false;
  std::set<std::string> taken;  // canonical forms of children and of actions on the path
  bool exhausted = false;       // no expandable action here and below

  double q(Backprop b) const { return aggregate(stats, b); }
  bool has_active_template() const;
};

/// floor(N^alpha) >= children, or children < fan-out.
bool expansion_gate_open(std::size_t visits, std::size_t children, const SearchConfig& cfg);

/// Tree-policy score of one edge (uct, spUct, uct2). Random has no score.
double edge_score(const Node& parent, const Edge& e, const SearchConfig& cfg);

/// Index of the edge to descend. Requires at least one non-exhausted child.
/// Ties go to the edge with fewer visits, then the smaller canonical form.
std::size_t select_child(const Node& n, const SearchConfig& cfg, Rng& rng);

struct SearchResult {
  std::vector<Pattern> patterns;  // discovery order; each above the success threshold
  std::size_t iterations = 0;
  std::size_t node_count = 0;
  std::size_t model_action_count = 0;
  double wall_time = 0.0;  // seconds; not part of equality

  bool operator==(const SearchResult& o) const {
    return patterns == o.patterns && iterations == o.iterations && node_count == o.node_count &&
           model_action_count == o.model_action_count;
  }
};

/// Single-player MCTS over (dataset, model) states with a transposition table.
class Search {
 public:
  Search(const Dataset& d0, SearchConfig cfg, std::ostream* trace = nullptr);
  Search(const Search&) = delete;
  Search& operator=(const Search&) = delete;

  /// One selection / expansion / simulation / backpropagation round.
  void step();
  void run(std::size_t iterations);

  SearchResult result() const;

  Node& root() { return *root_; }
  const Node& root() const { return *root_; }
  std::size_t node_count() const { return table_.size(); }
  std::size_t iteration() const { return iteration_; }
  Node* find(const Fingerprint& key);
  const SearchConfig& config() const { return cfg_; }
  actions::ParamStatsStore& param_stats() { return param_stats_; }
  const std::vector<Pattern>& patterns() const { return patterns_; }

  /// Applies `a` at `parent`, linking to an existing state when the result
  /// transposes one, otherwise creating and simulating a new node. Adds an
  /// unvisited edge. Returns the edge index, or nullopt when a model fit failed.
  std::optional<std::size_t> add_child(Node& parent, const GroundAction& a);

  /// Updates node and edge statistics along a traversal and the parameter
  /// statistics of each traversed action. `edges[i]` leads from nodes[i] to nodes[i+1].
  void backpropagate(const std::vector<Node*>& nodes, const std::vector<std::size_t>& edges, double reward);

 private:
  Node* make_node(const Fingerprint& key, std::shared_ptr<const Dataset> d,
                  std::shared_ptr<const mining::FittedModel> m, std::vector<std::string> path);
  void prepare_templates(Node& n);
  /// Tries to add one new child. Returns the edge index or nullopt.
  std::optional<std::size_t> expand(Node& n, bool& fit_failed);
  double simulate(Node& n);
  void refresh_exhausted(Node& n);
  void trace_line(const std::vector<Node*>& nodes, const std::string& kind, double reward, bool created);

  SearchConfig cfg_;
  std::ostream* trace_ = nullptr;
  Rng rng_;
  std::unordered_map<Fingerprint, std::unique_ptr<Node>, FingerprintHash> table_;
  Node* root_ = nullptr;
  actions::ParamStatsStore param_stats_;
  std::vector<Pattern> patterns_;
  std::set<Fingerprint> reported_;
  std::size_t iteration_ = 0;
  std::size_t model_actions_ = 0;
  double elapsed_ = 0.0;
};

SearchResult run_search(const Dataset& d0, const SearchConfig& cfg, std::ostream* trace = nullptr);

/// Replays canonical action strings from the empty view of `d0`.
struct ReplayedState {
  Dataset dataset;
  std::shared_ptr<const mining::FittedModel> model;
};
ReplayedState replay(const Dataset& d0, const std::vector<std::string>& lineage);

/// Predicate over patterns: model kind among `model_kinds` (empty = any),
/// every listed base column involved, and each required metric equal.
struct PatternDescriptor {
  std::string name;
  std::vector<std::string> model_kinds;
  std::vector<std::string> base_columns;
  std::map<std::string, double> required_metrics;

  bool matches(const Pattern& p) const;
};

struct PatternMetrics {
  std::size_t count = 0;
  std::size_t found = 0;
};

/// count = matching reported patterns, found = min(count, 1), per descriptor.
std::vector<PatternMetrics> collect_metrics(const SearchResult& result,
                                            const std::vector<PatternDescriptor>& expected);

}  // namespace insight::search
