#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "autoblock/hashing.hpp"

namespace autoblock {

struct EmbeddingConfig {
  std::size_t dim = 64;
  std::size_t bucket_count = std::size_t{1} << 16;
  int min_n = 3;
  int max_n = 5;
  std::uint64_t hash_seed = kDefaultHashSeed;
};

/// Character n-grams (UTF-8 code points) of `<token>` with lengths
/// min_n..max_n, followed by the whole wrapped token unless it already
/// appeared as an n-gram.
std::vector<std::string> ngrams(std::string_view token, int min_n, int max_n);

using TokenVector = std::vector<double>;

/// Hashed character-n-gram embeddings with an optional frozen table of
/// pretrained word vectors consulted first.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;

  /// Rows uniform in [-1/d, +1/d].
  EmbeddingTable(const EmbeddingConfig& config, std::uint64_t init_seed);

  static EmbeddingTable zeros(const EmbeddingConfig& config);

  const EmbeddingConfig& config() const { return config_; }
  std::size_t dim() const { return config_.dim; }
  std::size_t bucket_count() const { return config_.bucket_count; }

  /// Bucket rows summed for a token (empty for pretrained tokens).
  std::vector<std::uint32_t> buckets(std::string_view token) const;

  bool is_pretrained(std::string_view token) const;
  /// Pretrained vector, or nullptr.
  const double* pretrained(std::string_view token) const;

  TokenVector embed(std::string_view token) const;

  std::span<double> row(std::size_t bucket) {
    return {rows_.data() + bucket * config_.dim, config_.dim};
  }
  std::span<const double> row(std::size_t bucket) const {
    return {rows_.data() + bucket * config_.dim, config_.dim};
  }
  std::vector<double>& rows() { return rows_; }
  const std::vector<double>& rows() const { return rows_; }

  /// Whether hashed rows receive gradient updates.
  bool trainable() const { return trainable_; }
  void set_trainable(bool value) { trainable_ = value; }

  void add_pretrained(std::string token, std::span<const double> values);
  std::size_t pretrained_count() const { return pretrained_tokens_.size(); }
  const std::vector<std::string>& pretrained_tokens() const { return pretrained_tokens_; }
  const std::vector<double>& pretrained_values() const { return pretrained_values_; }

  friend bool operator==(const EmbeddingTable& a, const EmbeddingTable& b) {
    return a.config_.dim == b.config_.dim && a.config_.bucket_count == b.config_.bucket_count &&
           a.config_.min_n == b.config_.min_n && a.config_.max_n == b.config_.max_n &&
           a.config_.hash_seed == b.config_.hash_seed && a.rows_ == b.rows_ &&
           a.trainable_ == b.trainable_ && a.pretrained_tokens_ == b.pretrained_tokens_ &&
           a.pretrained_values_ == b.pretrained_values_;
  }

 private:
  void validate() const;

  EmbeddingConfig config_;
  std::vector<double> rows_;
  bool trainable_ = true;
  std::vector<std::string> pretrained_tokens_;
  std::vector<double> pretrained_values_;
  std::unordered_map<std::string, std::size_t> pretrained_index_;
};

TokenVector embed_token(const EmbeddingTable& table, std::string_view token);

/// Text vectors, one `token v1 .. vd` per line; a leading `count dim`
/// header line (fastText .vec style) is skipped. The dimension comes from
/// the file; bucket_count, n-gram range and hash seed from `fallback`.
/// Hashed rows for out-of-vocabulary tokens are seeded from `init_seed`.
EmbeddingTable load_pretrained(const std::string& path, EmbeddingConfig fallback,
                               std::uint64_t init_seed);

}  // namespace autoblock
