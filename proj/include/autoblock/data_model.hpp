#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace autoblock {

/// One attribute value as a token sequence. Zero tokens means missing.
struct AttributeValue {
  std::vector<std::string> tokens;

  std::size_t length() const { return tokens.size(); }
  bool missing() const { return tokens.empty(); }
  /// Tokens joined by single spaces.
  std::string joined() const;

  friend bool operator==(const AttributeValue&, const AttributeValue&) = default;
};

struct Tuple {
  std::string record_id;
  std::vector<AttributeValue> attributes;

  friend bool operator==(const Tuple&, const Tuple&) = default;
};

struct Table {
  std::string name;
  std::vector<Tuple> tuples;

  friend bool operator==(const Table&, const Table&) = default;
};

/// Tuples addressed by a global index: table 0 rows first, then table 1.
/// Record ids are unique across the whole dataset so that label files and
/// candidate files can name a tuple without naming its table.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<std::string> schema);

  /// Appends a table; at most two. Throws on schema width mismatch or a
  /// duplicate record id.
  void add_table(Table table);

  const std::vector<std::string>& schema() const { return schema_; }
  std::size_t attribute_count() const { return schema_.size(); }
  const std::vector<Table>& tables() const { return tables_; }
  std::size_t table_count() const { return tables_.size(); }
  bool bipartite() const { return tables_.size() == 2; }
  std::size_t size() const { return offsets_.empty() ? 0 : offsets_.back(); }

  const Tuple& tuple(std::size_t global) const;
  std::size_t table_of(std::size_t global) const;
  /// First global index of table t.
  std::size_t table_offset(std::size_t t) const { return offsets_[t]; }
  std::size_t table_size(std::size_t t) const { return tables_[t].tuples.size(); }
  std::optional<std::size_t> find(std::string_view record_id) const;
  std::optional<std::size_t> attribute_index(std::string_view name) const;

  /// New dataset restricted to the given global indices (table membership
  /// and relative order preserved).
  Dataset subset(const std::vector<std::size_t>& globals) const;

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.schema_ == b.schema_ && a.tables_ == b.tables_;
  }

 private:
  std::vector<std::string> schema_;
  std::vector<Table> tables_;
  std::vector<std::size_t> offsets_{0};
  std::unordered_map<std::string, std::size_t> index_;
};

/// Lowercase + treebank tokenization. Blank input is a missing value.
AttributeValue tokenize(std::string_view raw);

enum class DataFormat { csv, tsv, jsonl };

DataFormat parse_format(std::string_view name);
/// Format from the file extension (.csv, .tsv, .jsonl/.json); csv otherwise.
DataFormat format_from_path(const std::string& path);

/// Reads one table. An empty schema selects every non-id column in header
/// order. Cells that are empty or all-whitespace become missing values.
/// JSON-lines values may be strings, numbers, booleans, null or arrays
/// (array elements are concatenated).
Table read_table(const std::string& path, DataFormat format, std::vector<std::string>& schema,
                 const std::string& id_column, const std::string& table_name = "A");

Dataset ingest(const std::string& path, DataFormat format, std::vector<std::string> schema,
               const std::string& id_column);

/// Two-table (bipartite) dataset; candidate pairs always cross tables.
Dataset ingest_bipartite(const std::string& path_a, const std::string& path_b, DataFormat format,
                         std::vector<std::string> schema, const std::string& id_column);

/// Writes table t with header `id_column,schema...`, cells as joined tokens.
void export_table(const Dataset& dataset, std::size_t t, const std::string& path,
                  DataFormat format, const std::string& id_column = "id");

using RecordPair = std::pair<std::string, std::string>;

/// Canonical (lexicographically smaller id first) pair; throws on a self-pair.
RecordPair canonical_pair(std::string_view a, std::string_view b);

class LabelSet {
 public:
  LabelSet() = default;

  /// Canonicalizes and deduplicates. Throws on self-pairs.
  void insert(std::string_view a, std::string_view b);
  bool contains(std::string_view a, std::string_view b) const;

  const std::set<RecordPair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }

  friend bool operator==(const LabelSet&, const LabelSet&) = default;

 private:
  std::set<RecordPair> pairs_;
};

/// Two-column delimited file with header `id_a,id_b` (comma or tab).
/// Throws on unknown ids or self-pairs, naming the line.
LabelSet load_labels(const std::string& path, const Dataset& dataset);

void save_labels(const LabelSet& labels, const std::string& path);

}  // namespace autoblock
