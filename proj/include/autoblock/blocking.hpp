#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "autoblock/data_model.hpp"
#include "autoblock/lsh.hpp"
#include "autoblock/signatures.hpp"

namespace autoblock {

/// Best signature (1-based) and its cosine for one candidate pair.
struct Provenance {
  std::uint32_t signature = 0;
  double cosine = 0.0;
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

class CandidateSet {
 public:
  /// Canonicalizes the pair; keeps the provenance with the larger cosine.
  void insert(std::string_view a, std::string_view b, std::optional<Provenance> provenance = {});
  void merge(const CandidateSet& other);
  bool contains(std::string_view a, std::string_view b) const;

  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  const std::map<RecordPair, std::optional<Provenance>>& pairs() const { return pairs_; }
  bool has_provenance() const;

  friend bool operator==(const CandidateSet&, const CandidateSet&) = default;

 private:
  std::map<RecordPair, std::optional<Provenance>> pairs_;
};

struct BlockingParams {
  double theta = 0.8;
  LshParams lsh;
  std::size_t max_results = 0;  // 0 selects default_max_results(n1)
};

/// Per-tuple signature vectors, indexed [tuple][signature].
using SignatureMatrix = std::vector<std::vector<TupleSignature>>;

SignatureMatrix compute_signatures(const Dataset& dataset, const SignatureModel& model);

/// Nearest-neighbour blocking over precomputed signatures. For each
/// signature listed in `only` (all when empty) the larger table, or the
/// single table, is indexed and every tuple on the other side queries it.
/// Tuples with a missing signature take no part in that signature.
CandidateSet block_signatures(const Dataset& dataset, const SignatureMatrix& signatures,
                              const BlockingParams& params, const std::vector<std::size_t>& only = {});

CandidateSet block(const Dataset& dataset, const SignatureModel& model, const BlockingParams& params);

/// Every admissible pair with max-over-signature cosine >= theta, by
/// exhaustive comparison.
CandidateSet brute_force_block(const Dataset& dataset, const SignatureMatrix& signatures, double theta);

/// |C| / n. Throws when n is zero.
double pe_ratio(const CandidateSet& candidates, std::size_t tuple_count);

/// `id_a,id_b` plus `signature_id,cosine` when every pair has provenance.
void write_candidates(const CandidateSet& candidates, std::ostream& out);
void write_candidates(const CandidateSet& candidates, const std::string& path);
CandidateSet read_candidates(const std::string& path);

}  // namespace autoblock
