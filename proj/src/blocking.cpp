#include "autoblock/blocking.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "autoblock/csv.hpp"
#include "autoblock/error.hpp"
#include "autoblock/hashing.hpp"

namespace autoblock {

void CandidateSet::insert(std::string_view a, std::string_view b, std::optional<Provenance> provenance) {
  auto [it, inserted] = pairs_.emplace(canonical_pair(a, b), provenance);
  if (inserted || !provenance) return;
  auto& current = it->second;
  if (!current || provenance->cosine > current->cosine) current = provenance;
}

void CandidateSet::merge(const CandidateSet& other) {
  for (const auto& [pair, provenance] : other.pairs_) insert(pair.first, pair.second, provenance);
}

bool CandidateSet::contains(std::string_view a, std::string_view b) const {
  if (a == b) return false;
  if (b < a) std::swap(a, b);
  return pairs_.count(RecordPair{std::string(a), std::string(b)}) > 0;
}

bool CandidateSet::has_provenance() const {
  return !pairs_.empty() &&
         std::all_of(pairs_.begin(), pairs_.end(), [](const auto& entry) { return entry.second.has_value(); });
}

SignatureMatrix compute_signatures(const Dataset& dataset, const SignatureModel& model) {
  if (dataset.schema() != model.schema) throw Error("dataset schema does not match the model");
  SignatureMatrix out(dataset.size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(dataset.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t t = 0; t < n; ++t) out[t] = model.signatures(dataset.tuple(static_cast<std::size_t>(t)));
  return out;
}

namespace {

std::optional<std::vector<double>> unit(const TupleSignature& sig) {
  if (!sig) return std::nullopt;
  double norm = 0.0;
  for (double x : *sig) norm += x * x;
  if (norm == 0.0) return std::nullopt;
  norm = std::sqrt(norm);
  std::vector<double> v(*sig);
  for (double& x : v) x /= norm;
  return v;
}

}  // namespace

CandidateSet block_signatures(const Dataset& dataset, const SignatureMatrix& signatures,
                              const BlockingParams& params, const std::vector<std::size_t>& only) {
  if (signatures.size() != dataset.size()) throw Error("signature matrix does not match the dataset");
  CandidateSet result;
  if (dataset.size() == 0) return result;
  const std::size_t signature_count = signatures.front().size();
  std::vector<std::size_t> chosen = only;
  if (chosen.empty()) {
    for (std::size_t s = 0; s < signature_count; ++s) chosen.push_back(s);
  }

  // Indexed side and query side as ranges of global indices.
  std::size_t index_begin = 0, index_end = dataset.size(), query_begin = 0, query_end = dataset.size();
  if (dataset.bipartite()) {
    const std::size_t big = dataset.table_size(1) > dataset.table_size(0) ? 1 : 0;
    index_begin = dataset.table_offset(big);
    index_end = index_begin + dataset.table_size(big);
    query_begin = dataset.table_offset(1 - big);
    query_end = query_begin + dataset.table_size(1 - big);
  }
  const std::size_t max_results =
      params.max_results ? params.max_results : default_max_results(index_end - index_begin);

  for (std::size_t s : chosen) {
    if (s >= signature_count) throw Error("signature " + std::to_string(s + 1) + " out of range");
    std::vector<LshItem> items;
    std::vector<std::size_t> item_tuple;
    std::size_t dim = 0;
    for (std::size_t t = index_begin; t < index_end; ++t) {
      auto v = unit(signatures[t][s]);
      if (!v) continue;
      dim = v->size();
      items.push_back({dataset.tuple(t).record_id, static_cast<std::uint32_t>(s), std::move(*v)});
      item_tuple.push_back(t);
    }
    if (items.empty()) continue;
    LshParams lsh = params.lsh;
    lsh.seed = mix64(params.lsh.seed + s);
    const LshIndex index = LshIndex::build(std::move(items), dim, lsh);

    const std::ptrdiff_t queries = static_cast<std::ptrdiff_t>(query_end - query_begin);
    std::vector<std::vector<Neighbor>> found(static_cast<std::size_t>(queries));
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t k = 0; k < queries; ++k) {
      const std::size_t t = query_begin + static_cast<std::size_t>(k);
      auto q = unit(signatures[t][s]);
      if (!q) continue;
      // The tuple itself occupies a slot in self-join mode.
      const std::size_t cap = dataset.bipartite() ? max_results : max_results + 1;
      found[static_cast<std::size_t>(k)] = index.query(*q, params.theta, cap);
    }
    for (std::size_t k = 0; k < found.size(); ++k) {
      const std::size_t t = query_begin + k;
      std::size_t kept = 0;
      for (const Neighbor& nb : found[k]) {
        const std::size_t other = item_tuple[nb.item];
        if (other == t) continue;
        if (kept++ == max_results) break;
        result.insert(dataset.tuple(t).record_id, dataset.tuple(other).record_id,
                      Provenance{static_cast<std::uint32_t>(s + 1), nb.cosine});
      }
    }
  }
  return result;
}

CandidateSet block(const Dataset& dataset, const SignatureModel& model, const BlockingParams& params) {
  return block_signatures(dataset, compute_signatures(dataset, model), params);
}

CandidateSet brute_force_block(const Dataset& dataset, const SignatureMatrix& signatures, double theta) {
  if (signatures.size() != dataset.size()) throw Error("signature matrix does not match the dataset");
  CandidateSet result;
  const std::size_t n = dataset.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dataset.bipartite() && dataset.table_of(i) == dataset.table_of(j)) continue;
      std::optional<Provenance> best;
      for (std::size_t s = 0; s < signatures[i].size(); ++s) {
        const double c = cosine(signatures[i][s], signatures[j][s]);
        if (c >= theta && (!best || c > best->cosine)) best = Provenance{static_cast<std::uint32_t>(s + 1), c};
      }
      if (best) result.insert(dataset.tuple(i).record_id, dataset.tuple(j).record_id, best);
    }
  }
  return result;
}

double pe_ratio(const CandidateSet& candidates, std::size_t tuple_count) {
  if (tuple_count == 0) throw Error("P/E ratio of an empty dataset");
  return static_cast<double>(candidates.size()) / static_cast<double>(tuple_count);
}

void write_candidates(const CandidateSet& candidates, std::ostream& out) {
  const bool provenance = candidates.has_provenance();
  csv::write_row(out, provenance ? std::vector<std::string>{"id_a", "id_b", "signature_id", "cosine"}
                                 : std::vector<std::string>{"id_a", "id_b"});
  for (const auto& [pair, prov] : candidates.pairs()) {
    if (provenance) {
      csv::write_row(out, {pair.first, pair.second, std::to_string(prov->signature), csv::format_double(prov->cosine)});
    } else {
      csv::write_row(out, {pair.first, pair.second});
    }
  }
}

void write_candidates(const CandidateSet& candidates, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  write_candidates(candidates, out);
  if (!out) throw Error("failed writing '" + path + "'");
}

CandidateSet read_candidates(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  csv::Reader reader(in, ',');
  std::vector<std::string> fields;
  CandidateSet out;
  if (!reader.next(fields)) return out;
  if (fields.size() < 2 || fields[0] != "id_a" || fields[1] != "id_b") {
    throw Error(path + ": expected header starting with id_a,id_b");
  }
  const bool provenance = fields.size() >= 4;
  while (reader.next(fields)) {
    const std::string where = path + ":" + std::to_string(reader.record_line());
    if (fields.size() < 2) throw Error(where + ": expected at least two columns");
    if (fields[0] == fields[1]) throw Error(where + ": self-pair '" + fields[0] + "'");
    std::optional<Provenance> prov;
    if (provenance && fields.size() >= 4) {
      try {
        prov = Provenance{static_cast<std::uint32_t>(std::stoul(fields[2])), std::stod(fields[3])};
      } catch (const std::exception&) {
        throw Error(where + ": bad signature_id/cosine");
      }
    }
    out.insert(fields[0], fields[1], prov);
  }
  return out;
}

}  // namespace autoblock
