#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "insight/tabular.hpp"

namespace insight::tabular {

struct ColumnSchema {
  ColumnType type = ColumnType::Categorical;
  std::string datetime_format;  // strptime-style; empty = ISO-8601
};

/// Column name -> declared type. Columns missing from the schema are inferred.
using Schema = std::map<std::string, ColumnSchema>;

/// Sidecar schema: {"Score": "numerical", "Exam Date": {"type": "datetime", "format": "%Y-%m-%d"}}.
Schema load_schema(const std::filesystem::path& path);
Schema parse_schema(const std::string& json_text);
std::string schema_to_json(const Dataset& d);

/// RFC-4180 records; the first record is the header.
std::vector<std::vector<std::string>> parse_csv_records(const std::string& text);

/// Reads a CSV file. Throws InputError for unreadable files and for cells
/// that do not parse under the declared type (message names row and column).
Dataset load_csv(const std::filesystem::path& path, const std::optional<Schema>& schema = std::nullopt);
Dataset parse_csv(const std::string& text, const std::optional<Schema>& schema = std::nullopt,
                  const std::string& origin_label = "inline");

/// Type inference for one column of raw cells (nulls ignored): number,
/// ISO datetime, duration literal, boolean, else categorical.
ColumnType infer_type(const std::vector<std::string>& cells);

std::string to_csv(const Dataset& d);
void write_csv(const Dataset& d, const std::filesystem::path& path);

}  // namespace insight::tabular
