#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "autoblock/data_model.hpp"
#include "autoblock/encoder.hpp"
#include "autoblock/text_embedding.hpp"

namespace autoblock {

/// Weights below this are treated as unused after training.
inline constexpr double kSupportThreshold = 1e-3;

/// S x m nonnegative signature weights, one unit-norm row per signature.
class SignatureWeights {
 public:
  SignatureWeights() = default;
  explicit SignatureWeights(std::size_t attributes) : attributes_(attributes) {}

  std::size_t signature_count() const { return attributes_ ? values_.size() / attributes_ : 0; }
  std::size_t attribute_count() const { return attributes_; }

  std::span<const double> row(std::size_t s) const {
    return {values_.data() + s * attributes_, attributes_};
  }
  std::span<double> row(std::size_t s) { return {values_.data() + s * attributes_, attributes_}; }

  void append_row(std::span<const double> w);
  /// Attributes j with w_sj > threshold.
  std::vector<std::size_t> support(std::size_t s, double threshold = kSupportThreshold) const;
  /// Zeroes entries at or below the threshold and renormalizes each row.
  void sparsify(double threshold = kSupportThreshold);
  /// Nonnegative, unit L2 norm within tol, pairwise disjoint supports.
  bool is_orthogonal(double tol = 1e-6) const;

  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const SignatureWeights&, const SignatureWeights&) = default;

 private:
  std::size_t attributes_ = 0;
  std::vector<double> values_;
};

using TupleSignature = std::optional<std::vector<double>>;

/// sum_j [g_j present] w_sj g_j; missing when no present attribute has
/// nonzero weight.
TupleSignature compute_signature(std::span<const double> weights_row,
                                 const std::vector<AttributeEmbedding>& attributes);

/// Cosine similarity; 0 if either side is missing or has zero norm.
double cosine(const TupleSignature& a, const TupleSignature& b);
double cosine(std::span<const double> a, std::span<const double> b);

/// Token embeddings, one attentional encoder per attribute, and the
/// signature weights shared by every signature function.
struct SignatureModel {
  std::vector<std::string> schema;
  EmbeddingTable embeddings;
  std::vector<AttentionalEncoder> encoders;
  SignatureWeights weights;
  /// Training configuration snapshot, persisted verbatim.
  std::vector<std::pair<std::string, std::string>> metadata;

  std::size_t signature_count() const { return weights.signature_count(); }

  std::vector<AttributeEmbedding> attribute_embeddings(const Tuple& tuple) const;
  std::vector<TupleSignature> signatures(const Tuple& tuple) const;

  friend bool operator==(const SignatureModel&, const SignatureModel&) = default;
};

/// max over s of cosine(f_s(x), f_s(x')).
double tuple_similarity(const SignatureModel& model, const Tuple& x, const Tuple& y);
double tuple_similarity(const std::vector<TupleSignature>& x, const std::vector<TupleSignature>& y);

}  // namespace autoblock
