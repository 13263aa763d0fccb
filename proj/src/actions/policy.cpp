#include <cmath>
#include <algorithm>
#include <limits>
#include <memory>

#include "insight/actions.hpp"
#include "insight/error.hpp"

namespace insight::actions {

std::string_view to_string(ParamPolicy p) {
  switch (p) {
    case ParamPolicy::Random: return "random";
    case ParamPolicy::WeightedRandom: return "weighted-random";
    case ParamPolicy::Uct: return "uct";
  }
  return "random";
}

std::string ParamStatsStore::key(ActionKind kind, std::string_view param, std::string_view value) {
  std::string k(to_string(kind));
  k += '\x1f';
  k += param;
  k += '\x1f';
  k += value;
  return k;
}

const ParamValueStats* ParamStatsStore::find(ActionKind kind, std::string_view param, std::string_view value) const {
  auto it = entries_.find(key(kind, param, value));
  return it == entries_.end() ? nullptr : &it->second;
}

ParamValueStats& ParamStatsStore::at(ActionKind kind, std::string_view param, std::string_view value) {
  return entries_[key(kind, param, value)];
}

void ParamStatsStore::record(const GroundAction& a, double delta) {
  for (const auto& b : a.bindings()) {
    auto& s = at(a.kind(), b.param, b.value);
    s.delta_sum += delta;
    ++s.visits;
  }
}

std::vector<double> weighted_probabilities(ActionKind kind, std::string_view param,
                                           std::span<const std::string> values, const ParamStatsStore& stats,
                                           double epsilon) {
  std::vector<double> w(values.size(), epsilon);
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (const auto* s = stats.find(kind, param, values[i])) {
      if (auto m = s->mean_delta()) w[i] = std::max(*m, epsilon);
    }
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

std::size_t choose_value(ActionKind kind, std::string_view param, std::span<const std::string> values,
                         const PolicyParams& policy, const ParamStatsStore& stats, Rng& rng) {
  if (values.empty()) throw PreconditionError("no values to choose from for '" + std::string(param) + "'");
  if (values.size() == 1) return 0;
  switch (policy.policy) {
    case ParamPolicy::Random: {
      std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
      return pick(rng);
    }
    case ParamPolicy::WeightedRandom: {
      const auto p = weighted_probabilities(kind, param, values, stats, policy.epsilon);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      const double x = u(rng);
      double acc = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        if (x < acc) return i;
      }
      return p.size() - 1;
    }
    case ParamPolicy::Uct: {
      std::vector<std::size_t> unvisited;
      std::size_t total = 0;
      for (std::size_t i = 0; i < values.size(); ++i) {
        const auto* s = stats.find(kind, param, values[i]);
        if (!s || s->visits == 0) unvisited.push_back(i);
        else total += s->visits;
      }
      if (!unvisited.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, unvisited.size() - 1);
        return unvisited[pick(rng)];
      }
      const double log_total = std::log(static_cast<double>(total));
      std::size_t best = 0;
      double best_score = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < values.size(); ++i) {
        const auto* s = stats.find(kind, param, values[i]);
        const double score =
            *s->mean_delta() + policy.exploration * std::sqrt(log_total / static_cast<double>(s->visits));
        if (score > best_score) {
          best_score = score;
          best = i;
        }
      }
      return best;
    }
  }
  return 0;
}

namespace {

// One slot occurrence under a fixed prefix of choices.
struct ChoiceNode {
  std::vector<bool> dead;
  std::vector<std::unique_ptr<ChoiceNode>> kids;
};

struct Step {
  ChoiceNode* node;
  std::size_t index;
  const std::string* param;
};

}  // namespace

std::optional<GroundAction> instantiate(const ActionTemplate& t, const Dataset& d, const PolicyParams& policy,
                                        const ParamStatsStore& stats, Rng& rng, const PreconditionContext& ctx,
                                        std::size_t max_attempts, InstantiateLog* log) {
  std::unique_ptr<ChoiceNode> root;
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    if (log) ++log->attempts;
    std::vector<Binding> bindings;
    std::vector<Step> path;
    std::vector<std::pair<const std::vector<ParamSlot>*, std::size_t>> frames{{&t.slots, 0}};
    std::unique_ptr<ChoiceNode>* slot_node = &root;
    while (true) {
      while (!frames.empty() && frames.back().second >= frames.back().first->size()) frames.pop_back();
      if (frames.empty()) break;
      auto& [seq, idx] = frames.back();
      const ParamSlot& slot = (*seq)[idx];
      ++idx;
      if (!*slot_node) {
        *slot_node = std::make_unique<ChoiceNode>();
        (*slot_node)->dead.assign(slot.values.size(), false);
        (*slot_node)->kids.resize(slot.values.size());
      }
      ChoiceNode* node = slot_node->get();
      std::vector<std::size_t> alive;
      std::vector<std::string> alive_values;
      for (std::size_t v = 0; v < slot.values.size(); ++v) {
        if (!node->dead[v]) {
          alive.push_back(v);
          alive_values.push_back(slot.values[v]);
        }
      }
      if (alive.empty()) return std::nullopt;  // cannot happen once dead choices propagate
      const std::size_t pick = alive[choose_value(t.kind, slot.name, alive_values, policy, stats, rng)];
      path.push_back({node, pick, &slot.name});
      bindings.push_back({slot.name, slot.values[pick]});
      if (!slot.next.empty() && !slot.next[pick].empty()) frames.emplace_back(&slot.next[pick], 0);
      slot_node = &node->kids[pick];
    }

    GroundAction action(t.kind, bindings);
    Verdict v = check_precondition(action, d, ctx);
    if (v.ok()) return action;
    if (log) log->rejected.push_back(v);
    if (path.empty()) return std::nullopt;

    std::size_t pos = path.size() - 1;
    if (!v.blamed_param.empty()) {
      for (std::size_t i = path.size(); i-- > 0;) {
        if (*path[i].param == v.blamed_param) {
          pos = i;
          break;
        }
      }
    }
    path[pos].node->dead[path[pos].index] = true;
    for (std::size_t p = pos + 1; p-- > 0;) {
      const auto& dead = path[p].node->dead;
      if (std::find(dead.begin(), dead.end(), false) != dead.end()) break;
      if (p == 0) return std::nullopt;
      path[p - 1].node->dead[path[p - 1].index] = true;
    }
  }
  return std::nullopt;
}

}  // namespace insight::actions
