#include <numeric>

#include "insight/error.hpp"
#include "insight/tabular.hpp"

namespace insight::tabular {
namespace {

std::shared_ptr<const std::vector<uint32_t>> identity_index(std::size_t n) {
  auto idx = std::make_shared<std::vector<uint32_t>>(n);
  std::iota(idx->begin(), idx->end(), 0u);
  return idx;
}

std::shared_ptr<const SourceTable> make_source(std::vector<Column>& columns) {
  auto src = std::make_shared<SourceTable>();
  src->row_count = columns.empty() ? 0 : columns.front().size();
  for (auto& c : columns) {
    if (c.size() != src->row_count) {
      throw PreconditionError("column '" + c.name() + "' has " + std::to_string(c.size()) + " rows, expected " +
                              std::to_string(src->row_count));
    }
    if (src->find(c.name())) throw PreconditionError("duplicate column name '" + c.name() + "'");
    src->columns.push_back(std::make_shared<const Column>(std::move(c)));
  }
  return src;
}

}  // namespace

ColumnPtr SourceTable::find(std::string_view name) const {
  for (const auto& c : columns) {
    if (c->name() == name) return c;
  }
  return nullptr;
}

Dataset Dataset::from_columns(std::vector<Column> columns, std::vector<std::string> lineage) {
  Dataset d;
  d.source_ = make_source(columns);
  d.row_count_ = d.source_->row_count;
  d.row_index_ = identity_index(d.row_count_);
  d.columns_ = d.source_->columns;
  d.lineage_ = std::move(lineage);
  return d;
}

Dataset Dataset::empty_view() const {
  Dataset d;
  d.source_ = source_;
  d.row_count_ = source_ ? source_->row_count : 0;
  d.row_index_ = identity_index(d.row_count_);
  return d;
}

ColumnPtr Dataset::find(std::string_view name) const {
  for (const auto& c : columns_) {
    if (c->name() == name) return c;
  }
  return nullptr;
}

std::optional<std::size_t> Dataset::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i]->name() == name) return i;
  }
  return std::nullopt;
}

Dataset Dataset::with_column(ColumnPtr column, std::string action) const {
  if (!column) throw PreconditionError("null column");
  if (column->size() != row_count_) {
    throw PreconditionError("column '" + column->name() + "' does not match the dataset row count");
  }
  if (find(column->name())) throw PreconditionError("column '" + column->name() + "' already present");
  Dataset d = *this;
  d.columns_.push_back(std::move(column));
  d.lineage_.push_back(std::move(action));
  return d;
}

Dataset Dataset::with_rows(const std::vector<uint32_t>& keep, std::string action) const {
  Dataset d;
  d.source_ = source_;
  auto idx = std::make_shared<std::vector<uint32_t>>();
  idx->reserve(keep.size());
  for (uint32_t r : keep) {
    if (r >= row_count_) throw PreconditionError("row index out of range");
    idx->push_back((*row_index_)[r]);
  }
  d.row_index_ = std::move(idx);
  d.row_count_ = keep.size();
  d.columns_.reserve(columns_.size());
  for (const auto& c : columns_) d.columns_.push_back(std::make_shared<const Column>(c->take(keep)));
  d.lineage_ = lineage_;
  d.lineage_.push_back(std::move(action));
  return d;
}

Dataset Dataset::with_lineage(std::string action) const {
  Dataset d = *this;
  d.lineage_.push_back(std::move(action));
  return d;
}

Dataset Dataset::regrouped(std::vector<Column> columns, std::vector<std::string> lineage) {
  return from_columns(std::move(columns), std::move(lineage));
}

bool Dataset::same_content(const Dataset& other) const {
  if (row_count_ != other.row_count_ || columns_.size() != other.columns_.size()) return false;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i] == other.columns_[i]) continue;
    if (!(*columns_[i] == *other.columns_[i])) return false;
  }
  return true;
}

}  // namespace insight::tabular
