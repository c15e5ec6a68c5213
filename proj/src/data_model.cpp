#include "autoblock/data_model.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "autoblock/csv.hpp"
#include "autoblock/error.hpp"
#include "autoblock/tokenizer.hpp"

namespace autoblock {

std::string AttributeValue::joined() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

Dataset::Dataset(std::vector<std::string> schema) : schema_(std::move(schema)) {}

void Dataset::add_table(Table table) {
  if (tables_.size() >= 2) throw Error("a dataset holds at most two tables");
  const std::size_t base = size();
  for (std::size_t r = 0; r < table.tuples.size(); ++r) {
    const Tuple& t = table.tuples[r];
    if (t.attributes.size() != schema_.size()) {
      throw Error("record '" + t.record_id + "' has " + std::to_string(t.attributes.size()) +
                  " attributes, schema has " + std::to_string(schema_.size()));
    }
    if (!index_.emplace(t.record_id, base + r).second) {
      throw Error("duplicate record_id '" + t.record_id + "'");
    }
  }
  offsets_.push_back(base + table.tuples.size());
  tables_.push_back(std::move(table));
}

std::size_t Dataset::table_of(std::size_t global) const {
  if (global >= size()) throw Error("tuple index out of range");
  return global < offsets_[1] ? 0 : 1;
}

const Tuple& Dataset::tuple(std::size_t global) const {
  const std::size_t t = table_of(global);
  return tables_[t].tuples[global - offsets_[t]];
}

std::optional<std::size_t> Dataset::find(std::string_view record_id) const {
  auto it = index_.find(std::string(record_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Dataset::attribute_index(std::string_view name) const {
  auto it = std::find(schema_.begin(), schema_.end(), name);
  if (it == schema_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - schema_.begin());
}

Dataset Dataset::subset(const std::vector<std::size_t>& globals) const {
  std::vector<std::size_t> sorted = globals;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  Dataset out(schema_);
  for (std::size_t t = 0; t < tables_.size(); ++t) {
    Table table{tables_[t].name, {}};
    for (std::size_t g : sorted) {
      if (table_of(g) == t) table.tuples.push_back(tuple(g));
    }
    out.add_table(std::move(table));
  }
  return out;
}

AttributeValue tokenize(std::string_view raw) {
  return AttributeValue{treebank_tokenize(ascii_lower(raw))};
}

DataFormat parse_format(std::string_view name) {
  if (name == "csv") return DataFormat::csv;
  if (name == "tsv") return DataFormat::tsv;
  if (name == "jsonl" || name == "json") return DataFormat::jsonl;
  throw ConfigError("unknown data format '" + std::string(name) + "' (expected csv, tsv, jsonl)");
}

DataFormat format_from_path(const std::string& path) {
  auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() &&
           path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with(".tsv")) return DataFormat::tsv;
  if (ends_with(".jsonl") || ends_with(".json")) return DataFormat::jsonl;
  return DataFormat::csv;
}

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return in;
}

bool all_blank(const std::vector<std::string>& fields) {
  return std::all_of(fields.begin(), fields.end(), [](const std::string& f) {
    return std::all_of(f.begin(), f.end(), [](char c) { return c == ' ' || c == '\t'; });
  });
}

std::string json_text(const nlohmann::ordered_json& value) {
  if (value.is_null()) return {};
  if (value.is_string()) return value.get<std::string>();
  if (value.is_array()) {
    std::string out;
    for (const auto& element : value) {
      std::string part = json_text(element);
      if (part.empty()) continue;
      if (!out.empty()) out.push_back(' ');
      out += part;
    }
    return out;
  }
  return value.dump();
}

Table read_delimited(const std::string& path, char delimiter, std::vector<std::string>& schema,
                     const std::string& id_column, const std::string& table_name) {
  std::ifstream in = open_input(path);
  csv::Reader reader(in, delimiter);
  std::vector<std::string> header;
  if (!reader.next(header)) throw Error("'" + path + "' is empty (no header row)");

  auto column = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error("'" + path + "' has no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t id_col = column(id_column);
  if (schema.empty()) {
    for (const auto& h : header)
      if (h != id_column) schema.push_back(h);
  }
  std::vector<std::size_t> cols;
  for (const auto& name : schema) cols.push_back(column(name));

  Table table{table_name, {}};
  std::vector<std::string> fields;
  std::size_t row = 0;
  while (reader.next(fields)) {
    ++row;
    if (all_blank(fields) && fields.size() <= 1) continue;
    if (fields.size() != header.size()) {
      throw Error("malformed row " + std::to_string(row) + " (line " +
                  std::to_string(reader.record_line()) + ") in '" + path + "': expected " +
                  std::to_string(header.size()) + " fields, found " +
                  std::to_string(fields.size()));
    }
    Tuple t;
    t.record_id = fields[id_col];
    if (t.record_id.empty()) {
      throw Error("malformed row " + std::to_string(row) + " in '" + path + "': empty id");
    }
    for (std::size_t c : cols) t.attributes.push_back(tokenize(fields[c]));
    table.tuples.push_back(std::move(t));
  }
  return table;
}

Table read_jsonl(const std::string& path, std::vector<std::string>& schema,
                 const std::string& id_column, const std::string& table_name) {
  std::ifstream in = open_input(path);
  Table table{table_name, {}};
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::ordered_json obj;
    try {
      obj = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error("malformed row " + std::to_string(row) + " in '" + path + "': " + e.what());
    }
    if (!obj.is_object()) {
      throw Error("malformed row " + std::to_string(row) + " in '" + path + "': not an object");
    }
    if (schema.empty()) {
      for (const auto& [key, value] : obj.items())
        if (key != id_column) schema.push_back(key);
    }
    if (!obj.contains(id_column)) {
      throw Error("malformed row " + std::to_string(row) + " in '" + path + "': missing key '" +
                  id_column + "'");
    }
    Tuple t;
    t.record_id = json_text(obj[id_column]);
    if (t.record_id.empty()) {
      throw Error("malformed row " + std::to_string(row) + " in '" + path + "': empty id");
    }
    for (const auto& name : schema) {
      auto it = obj.find(name);
      t.attributes.push_back(it == obj.end() ? AttributeValue{} : tokenize(json_text(*it)));
    }
    table.tuples.push_back(std::move(t));
  }
  return table;
}

}  // namespace

Table read_table(const std::string& path, DataFormat format, std::vector<std::string>& schema,
                 const std::string& id_column, const std::string& table_name) {
  switch (format) {
    case DataFormat::csv: return read_delimited(path, ',', schema, id_column, table_name);
    case DataFormat::tsv: return read_delimited(path, '\t', schema, id_column, table_name);
    case DataFormat::jsonl: return read_jsonl(path, schema, id_column, table_name);
  }
  throw Error("unreachable data format");
}

Dataset ingest(const std::string& path, DataFormat format, std::vector<std::string> schema,
               const std::string& id_column) {
  Table table = read_table(path, format, schema, id_column, "A");
  Dataset dataset(schema);
  dataset.add_table(std::move(table));
  return dataset;
}

Dataset ingest_bipartite(const std::string& path_a, const std::string& path_b, DataFormat format,
                         std::vector<std::string> schema, const std::string& id_column) {
  Table a = read_table(path_a, format, schema, id_column, "A");
  Table b = read_table(path_b, format, schema, id_column, "B");
  Dataset dataset(schema);
  dataset.add_table(std::move(a));
  dataset.add_table(std::move(b));
  return dataset;
}

void export_table(const Dataset& dataset, std::size_t t, const std::string& path,
                  DataFormat format, const std::string& id_column) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  const Table& table = dataset.tables().at(t);
  if (format == DataFormat::jsonl) {
    for (const Tuple& tuple : table.tuples) {
      nlohmann::ordered_json obj;
      obj[id_column] = tuple.record_id;
      for (std::size_t j = 0; j < dataset.schema().size(); ++j)
        obj[dataset.schema()[j]] = tuple.attributes[j].joined();
      out << obj.dump() << '\n';
    }
    return;
  }
  const char delimiter = format == DataFormat::tsv ? '\t' : ',';
  std::vector<std::string> row{id_column};
  row.insert(row.end(), dataset.schema().begin(), dataset.schema().end());
  csv::write_row(out, row, delimiter);
  for (const Tuple& tuple : table.tuples) {
    row.assign(1, tuple.record_id);
    for (const auto& value : tuple.attributes) row.push_back(value.joined());
    csv::write_row(out, row, delimiter);
  }
}

RecordPair canonical_pair(std::string_view a, std::string_view b) {
  if (a == b) throw Error("self-pair '" + std::string(a) + "'");
  if (b < a) std::swap(a, b);
  return {std::string(a), std::string(b)};
}

void LabelSet::insert(std::string_view a, std::string_view b) {
  pairs_.insert(canonical_pair(a, b));
}

bool LabelSet::contains(std::string_view a, std::string_view b) const {
  if (a == b) return false;
  if (b < a) std::swap(a, b);
  return pairs_.count(RecordPair{std::string(a), std::string(b)}) > 0;
}

LabelSet load_labels(const std::string& path, const Dataset& dataset) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open label file '" + path + "'");
  std::string first;
  std::getline(in, first);
  const char delimiter = first.find('\t') != std::string::npos ? '\t' : ',';
  in.clear();
  in.seekg(0);

  csv::Reader reader(in, delimiter);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw Error("label file '" + path + "' is empty");
  if (fields.size() != 2) {
    throw Error("label file '" + path + "' must have two columns (header id_a,id_b)");
  }
  LabelSet labels;
  while (reader.next(fields)) {
    const std::string where = "'" + path + "' line " + std::to_string(reader.record_line());
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != 2) throw Error("malformed label row at " + where);
    auto a = dataset.find(fields[0]);
    auto b = dataset.find(fields[1]);
    if (!a) throw Error("unknown record id '" + fields[0] + "' at " + where);
    if (!b) throw Error("unknown record id '" + fields[1] + "' at " + where);
    if (*a == *b) throw Error("self-pair '" + fields[0] + "' at " + where);
    if (dataset.bipartite() && dataset.table_of(*a) == dataset.table_of(*b)) {
      throw Error("label pair within one table at " + where + " (bipartite dataset)");
    }
    labels.insert(fields[0], fields[1]);
  }
  return labels;
}

void save_labels(const LabelSet& labels, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "id_a,id_b\n";
  for (const auto& [a, b] : labels.pairs()) csv::write_row(out, {a, b});
}

}  // namespace autoblock
