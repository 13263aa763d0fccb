#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>

#include "insight/error.hpp"
#include "insight/mining.hpp"

namespace insight::mining {
namespace {

using Bits = std::vector<uint64_t>;

std::size_t popcount(const Bits& b) {
  std::size_t s = 0;
  for (uint64_t w : b) s += static_cast<std::size_t>(std::popcount(w));
  return s;
}

Bits intersect(const Bits& a, const Bits& b) {
  Bits out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] & b[i];
  return out;
}

struct Catalog {
  std::vector<Item> items;
  std::vector<std::size_t> column_of;  // column ordinal per item
  std::vector<Bits> cover;
};

double rule_score_of(const Rule& r) { return r.kulc * (1.0 - r.imbalance); }

double kulc_of(double sa, double sb, double sab) { return 0.5 * (sab / sa + sab / sb); }

double imbalance_of(double sa, double sb, double sab) {
  const double denom = sa + sb - sab;
  return denom > 0.0 ? std::abs(sa - sb) / denom : 0.0;
}

}  // namespace

FittedModel mine_association_rules(const Dataset& d, const MiningParams& p) {
  const std::size_t n = d.row_count();
  if (n < p.min_rows) throw MiningError("rules need at least " + std::to_string(p.min_rows) + " rows");
  const std::size_t words = (n + 63) / 64;
  const double min_count = p.min_support * static_cast<double>(n) - 1e-12 * static_cast<double>(n);

  Catalog cat;
  std::vector<std::string> involved;
  std::size_t ordinal = 0;
  for (const auto& c : d.columns()) {
    if (!tabular::is_qualitative(c->type())) continue;
    std::map<int, std::size_t> slot;  // code -> item index
    for (std::size_t r = 0; r < n; ++r) {
      if (c->is_null(r)) continue;
      const int code = static_cast<int>(c->numeric(r));
      auto [it, inserted] = slot.try_emplace(code, cat.items.size());
      if (inserted) {
        cat.items.push_back({c->name(), c->cell_string(r)});
        cat.column_of.push_back(ordinal);
        cat.cover.emplace_back(words, 0);
      }
      cat.cover[it->second][r / 64] |= uint64_t{1} << (r % 64);
    }
    involved.push_back(c->name());
    ++ordinal;
  }
  if (involved.empty()) throw MiningError("rules need at least one qualitative column");

  // Level-wise Apriori over item ids; itemsets are sorted id vectors.
  std::map<std::vector<int>, std::size_t> support;
  std::map<std::vector<int>, Bits> level;
  for (std::size_t i = 0; i < cat.items.size(); ++i) {
    const std::size_t s = popcount(cat.cover[i]);
    if (static_cast<double>(s) >= min_count && s > 0) {
      level[{static_cast<int>(i)}] = cat.cover[i];
      support[{static_cast<int>(i)}] = s;
    }
  }
  for (std::size_t size = 2; size <= p.max_itemset && level.size() > 1; ++size) {
    std::map<std::vector<int>, Bits> next;
    for (auto a = level.begin(); a != level.end(); ++a) {
      for (auto b = std::next(a); b != level.end(); ++b) {
        if (!std::equal(a->first.begin(), a->first.end() - 1, b->first.begin())) break;
        const int last_a = a->first.back();
        const int last_b = b->first.back();
        if (cat.column_of[last_a] == cat.column_of[last_b]) continue;
        std::vector<int> cand = a->first;
        cand.push_back(last_b);
        bool all_frequent = true;
        for (std::size_t drop = 0; drop + 2 < cand.size() && all_frequent; ++drop) {
          std::vector<int> sub;
          for (std::size_t j = 0; j < cand.size(); ++j) {
            if (j != drop) sub.push_back(cand[j]);
          }
          all_frequent = level.count(sub) > 0;
        }
        if (!all_frequent) continue;
        Bits bits = intersect(a->second, cat.cover[last_b]);
        const std::size_t s = popcount(bits);
        if (s == 0 || static_cast<double>(s) < min_count) continue;
        support[cand] = s;
        next.emplace(std::move(cand), std::move(bits));
      }
    }
    level = std::move(next);
  }

  RuleArtifacts art;
  art.transactions = n;
  art.frequent_itemsets = support.size();
  const double total = static_cast<double>(n);
  auto to_items = [&](const std::vector<int>& ids) {
    std::vector<Item> out;
    for (int id : ids) out.push_back(cat.items[id]);
    return out;
  };
  for (const auto& [set, s_ab] : support) {
    if (set.size() < 2) continue;
    const std::size_t subsets = (std::size_t{1} << set.size()) - 1;
    for (std::size_t mask = 1; mask < subsets; ++mask) {
      std::vector<int> lhs, rhs;
      for (std::size_t j = 0; j < set.size(); ++j) ((mask >> j) & 1 ? lhs : rhs).push_back(set[j]);
      const double sa = static_cast<double>(support.at(lhs)) / total;
      const double sb = static_cast<double>(support.at(rhs)) / total;
      const double sab = static_cast<double>(s_ab) / total;
      const double conf = sab / sa;
      if (conf < p.min_confidence - 1e-12) continue;
      Rule r;
      r.antecedent = to_items(lhs);
      r.consequent = to_items(rhs);
      r.support_a = sa;
      r.support_b = sb;
      r.support_ab = sab;
      r.confidence = conf;
      r.kulc = kulc_of(sa, sb, sab);
      r.imbalance = imbalance_of(sa, sb, sab);
      art.rules.push_back(std::move(r));
    }
  }
  std::stable_sort(art.rules.begin(), art.rules.end(), [](const Rule& a, const Rule& b) {
    const double sa = rule_score_of(a), sb = rule_score_of(b);
    if (sa != sb) return sa > sb;
    if (a.antecedent != b.antecedent) return a.antecedent < b.antecedent;
    return a.consequent < b.consequent;
  });

  FittedModel m;
  m.kind = ModelKind::AssociationRules;
  m.action = GroundAction(actions::ActionKind::AssociationRules, {});
  std::set<std::string> used;
  for (const auto& r : art.rules) {
    for (const auto& it : r.antecedent) used.insert(it.column);
    for (const auto& it : r.consequent) used.insert(it.column);
  }
  for (const auto& c : involved) {
    if (used.count(c)) m.involved_columns.push_back(c);
  }
  m.artifacts = std::move(art);
  return m;
}

}  // namespace insight::mining
