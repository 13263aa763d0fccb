#include <algorithm>

#include "insight/actions.hpp"

namespace insight::actions {

Fingerprint canonical_state_key(const Dataset& d, std::string_view model_canonical) {
  std::vector<const tabular::Column*> cols;
  for (const auto& c : d.columns()) cols.push_back(c.get());
  std::sort(cols.begin(), cols.end(), [](const auto* a, const auto* b) { return a->name() < b->name(); });

  uint64_t header = 0x6a09e667f3bcc908ULL;
  std::vector<std::vector<uint64_t>> level_hashes(cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const auto* c = cols[j];
    header = hash_combine(header, hash_bytes(c->name()));
    header = hash_combine(header, hash_bytes(c->provenance()));
    header = hash_combine(header, static_cast<uint64_t>(c->type()) * 31 + static_cast<uint64_t>(c->origin()));
    if (c->type() == tabular::ColumnType::Categorical) {
      for (const auto& level : c->levels()) level_hashes[j].push_back(hash_bytes(level));
    }
  }

  // Order-independent multiset hash of the rows.
  uint64_t sum_a = 0, sum_b = 0;
  for (std::size_t r = 0; r < d.row_count(); ++r) {
    uint64_t h = 0x3c6ef372fe94f82bULL;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const auto* c = cols[j];
      uint64_t cell;
      if (c->is_null(r)) cell = 0x9b05688c2b3e6c1fULL;
      else if (c->type() == tabular::ColumnType::Categorical) cell = level_hashes[j][c->codes()[r]];
      else cell = hash_double(c->values()[r]);
      h = hash_combine(h, cell);
    }
    sum_a += mix64(h);
    sum_b += mix64(h ^ 0xa54ff53a5f1d36f1ULL);
  }

  const uint64_t model = hash_bytes(model_canonical);
  const uint64_t rows = static_cast<uint64_t>(d.row_count());
  Fingerprint f;
  f.hi = hash_combine(hash_combine(hash_combine(header, sum_a), rows), model);
  f.lo = hash_combine(hash_combine(hash_combine(mix64(header ^ 0x510e527fade682d1ULL), sum_b), rows + 1), ~model);
  return f;
}

}  // namespace insight::actions
