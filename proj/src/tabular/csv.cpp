#include "insight/csv.hpp"

#include <fstream>
#include <sstream>

#include "insight/error.hpp"
#include "insight/timefmt.hpp"
#include "json.hpp"

namespace insight::tabular {
namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string quote_cell(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

Column build_column(const std::string& name, const std::vector<std::string>& cells, const ColumnSchema& schema) {
  auto fail = [&](std::size_t row, const std::string& cell) {
    throw InputError("row " + std::to_string(row + 1) + ", column '" + name + "': cannot parse '" + cell + "' as " +
                     std::string(to_string(schema.type)));
  };
  if (schema.type == ColumnType::Categorical) {
    std::vector<std::optional<std::string>> v(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!timefmt::is_null_token(cells[i])) v[i] = cells[i];
    }
    return Column::categorical(name, v);
  }
  std::vector<double> v(cells.size(), std::nan(""));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string& cell = cells[i];
    if (timefmt::is_null_token(cell)) continue;
    std::optional<double> parsed;
    switch (schema.type) {
      case ColumnType::Numerical: parsed = timefmt::parse_number(cell); break;
      case ColumnType::Datetime:
        parsed = schema.datetime_format.empty() ? timefmt::parse_iso_datetime(cell)
                                                : timefmt::parse_datetime_format(cell, schema.datetime_format);
        break;
      case ColumnType::Timedelta: parsed = timefmt::parse_duration(cell); break;
      case ColumnType::Boolean:
        if (auto b = timefmt::parse_bool(cell)) parsed = *b ? 1.0 : 0.0;
        break;
      case ColumnType::Categorical: break;
    }
    if (!parsed) fail(i, cell);
    v[i] = *parsed;
  }
  return Column::numbers(name, schema.type, std::move(v));
}

}  // namespace

Schema parse_schema(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InputError(std::string("schema is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("schema must be a JSON object");
  Schema schema;
  for (const auto& [name, spec] : j.items()) {
    ColumnSchema cs;
    std::string type;
    if (spec.is_string()) {
      type = spec.get<std::string>();
    } else if (spec.is_object()) {
      for (const auto& [key, value] : spec.items()) {
        if (key == "type" && value.is_string()) {
          type = value.get<std::string>();
        } else if (key == "format" && value.is_string()) {
          cs.datetime_format = value.get<std::string>();
        } else {
          throw InputError("schema entry '" + name + "': unknown key '" + key + "'");
        }
      }
    } else {
      throw InputError("schema entry '" + name + "' must be a type name or an object");
    }
    auto t = parse_column_type(type);
    if (!t) throw InputError("schema entry '" + name + "': unknown type '" + type + "'");
    cs.type = *t;
    schema[name] = cs;
  }
  return schema;
}

Schema load_schema(const std::filesystem::path& path) { return parse_schema(read_file(path)); }

std::string schema_to_json(const Dataset& d) {
  json j = json::object();
  for (const auto& c : d.columns()) j[c->name()] = std::string(to_string(c->type()));
  return j.dump(2) + "\n";
}

std::vector<std::vector<std::string>> parse_csv_records(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string cell;
  bool quoted = false;
  bool cell_started = false;
  std::size_t i = 0;
  if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;  // UTF-8 BOM
  auto end_record = [&] {
    record.push_back(std::move(cell));
    cell.clear();
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
    cell_started = false;
  };
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
      continue;
    }
    if (c == '"' && !cell_started) {
      quoted = true;
      cell_started = true;
    } else if (c == ',') {
      record.push_back(std::move(cell));
      cell.clear();
      cell_started = false;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_record();
    } else {
      cell += c;
      cell_started = true;
    }
  }
  if (quoted) throw InputError("unterminated quoted field in CSV");
  if (cell_started || !record.empty() || !cell.empty()) end_record();
  return records;
}

ColumnType infer_type(const std::vector<std::string>& cells) {
  bool any = false;
  bool number = true, datetime = true, duration = true, boolean = true;
  for (const auto& cell : cells) {
    if (timefmt::is_null_token(cell)) continue;
    any = true;
    number = number && timefmt::parse_number(cell).has_value();
    datetime = datetime && timefmt::parse_iso_datetime(cell).has_value();
    duration = duration && timefmt::parse_duration(cell).has_value();
    boolean = boolean && timefmt::parse_bool(cell).has_value();
    if (!number && !datetime && !duration && !boolean) break;
  }
  if (!any) return ColumnType::Categorical;
  if (number) return ColumnType::Numerical;
  if (datetime) return ColumnType::Datetime;
  if (duration) return ColumnType::Timedelta;
  if (boolean) return ColumnType::Boolean;
  return ColumnType::Categorical;
}

Dataset parse_csv(const std::string& text, const std::optional<Schema>& schema, const std::string& origin_label) {
  auto records = parse_csv_records(text);
  if (records.empty()) throw InputError("CSV has no header row");
  const std::vector<std::string> header = records.front();
  const std::size_t width = header.size();
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != width) {
      throw InputError("row " + std::to_string(r) + ": expected " + std::to_string(width) + " fields, found " +
                       std::to_string(records[r].size()));
    }
  }
  if (schema) {
    for (const auto& [name, _] : *schema) {
      if (std::find(header.begin(), header.end(), name) == header.end()) {
        throw InputError("schema names column '" + name + "' which is not in the CSV header");
      }
    }
  }
  std::vector<Column> columns;
  columns.reserve(width);
  for (std::size_t j = 0; j < width; ++j) {
    std::vector<std::string> cells;
    cells.reserve(records.size() - 1);
    for (std::size_t r = 1; r < records.size(); ++r) cells.push_back(std::move(records[r][j]));
    ColumnSchema cs;
    if (schema) {
      auto it = schema->find(header[j]);
      if (it != schema->end()) cs = it->second;
      else cs.type = infer_type(cells);
    } else {
      cs.type = infer_type(cells);
    }
    if (header[j].empty()) throw InputError("column " + std::to_string(j + 1) + " has an empty name");
    columns.push_back(build_column(header[j], cells, cs));
  }
  try {
    return Dataset::from_columns(std::move(columns), {"load(" + origin_label + ")"});
  } catch (const PreconditionError& e) {
    throw InputError(e.what());
  }
}

Dataset load_csv(const std::filesystem::path& path, const std::optional<Schema>& schema) {
  return parse_csv(read_file(path), schema, path.filename().string());
}

std::string to_csv(const Dataset& d) {
  std::string out;
  for (std::size_t j = 0; j < d.column_count(); ++j) {
    if (j) out += ',';
    out += quote_cell(d.columns()[j]->name());
  }
  out += '\n';
  for (std::size_t r = 0; r < d.row_count(); ++r) {
    for (std::size_t j = 0; j < d.column_count(); ++j) {
      if (j) out += ',';
      out += quote_cell(d.columns()[j]->cell_string(r));
    }
    out += '\n';
  }
  return out;
}

void write_csv(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << to_csv(d);
}

}  // namespace insight::tabular
