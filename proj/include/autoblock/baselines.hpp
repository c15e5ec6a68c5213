#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "autoblock/blocking.hpp"
#include "autoblock/data_model.hpp"

namespace autoblock {

/// Blocking key: one attribute, a conjunction (the joined values must all
/// agree), or a disjunction (union over single-attribute keys).
struct KeySpec {
  enum class Kind { single, conjunction, disjunction };
  Kind kind = Kind::single;
  std::vector<std::string> attributes;

  /// "title", "title+album" (conjunction) or "title|album" (disjunction);
  /// "all" is the disjunction over the whole schema.
  static KeySpec parse(const std::string& text, const std::vector<std::string>& schema);
};

/// Exact agreement on the key (tokens joined by single spaces). Missing
/// values never match.
CandidateSet key_block(const Dataset& dataset, const KeySpec& key);

/// Tokens plus contiguous token n-grams for n = 2..ngram_n.
std::set<std::string> representative_set(const AttributeValue& value, std::size_t ngram_n);
std::set<std::string> representative_set(const Tuple& tuple, std::size_t attribute, std::size_t ngram_n);

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

struct MinHashParams {
  std::size_t bands = 32;  // K_mh
  std::size_t rows = 4;    // B_mh
  std::size_t ngram_n = 3;
  std::uint64_t seed = 1;
  bool verify = true;  // exact-Jaccard check on banded candidates

  void validate() const;
};

/// bands * rows universal hash functions ((a h + b) mod 2^61 - 1 over a
/// 64-bit element hash) with coefficients derived from one seed.
class MinHasher {
 public:
  MinHasher(std::size_t functions, std::uint64_t seed);

  std::size_t size() const { return a_.size(); }
  /// Minimum per function; all-ones for an empty set.
  std::vector<std::uint64_t> sketch(const std::set<std::string>& elements) const;

 private:
  std::vector<std::uint64_t> a_, b_;
};

/// Fraction of agreeing sketch positions.
double estimate_jaccard(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b);

/// Banded MinHash over one attribute (or every attribute, unioned, when
/// `attributes` lists several) with pairs kept at Jaccard >= theta.
CandidateSet minhash_block(const Dataset& dataset, const std::vector<std::size_t>& attributes,
                           double theta, const MinHashParams& params);

}  // namespace autoblock
