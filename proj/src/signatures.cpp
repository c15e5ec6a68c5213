#include "autoblock/signatures.hpp"

#include <algorithm>
#include <cmath>

#include "autoblock/error.hpp"

namespace autoblock {

void SignatureWeights::append_row(std::span<const double> w) {
  if (w.size() != attributes_) throw Error("signature weight row has wrong width");
  values_.insert(values_.end(), w.begin(), w.end());
}

std::vector<std::size_t> SignatureWeights::support(std::size_t s, double threshold) const {
  std::vector<std::size_t> out;
  auto w = row(s);
  for (std::size_t j = 0; j < w.size(); ++j)
    if (w[j] > threshold) out.push_back(j);
  return out;
}

void SignatureWeights::sparsify(double threshold) {
  for (std::size_t s = 0; s < signature_count(); ++s) {
    auto w = row(s);
    double norm = 0.0;
    for (double& x : w) {
      if (x <= threshold) x = 0.0;
      norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm > 0.0)
      for (double& x : w) x /= norm;
  }
}

bool SignatureWeights::is_orthogonal(double tol) const {
  std::vector<int> owner(attributes_, -1);
  for (std::size_t s = 0; s < signature_count(); ++s) {
    double norm = 0.0;
    for (std::size_t j = 0; j < attributes_; ++j) {
      const double x = row(s)[j];
      if (x < 0.0) return false;
      norm += x * x;
      if (x > 0.0) {
        if (owner[j] != -1) return false;
        owner[j] = static_cast<int>(s);
      }
    }
    if (std::abs(std::sqrt(norm) - 1.0) > tol) return false;
  }
  return true;
}

TupleSignature compute_signature(std::span<const double> w,
                                 const std::vector<AttributeEmbedding>& g) {
  if (w.size() != g.size()) throw Error("signature: weight/attribute count mismatch");
  std::vector<double> f;
  bool any = false;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (!g[j] || w[j] == 0.0) continue;
    if (!any) {
      f.assign(g[j]->size(), 0.0);
      any = true;
    }
    for (std::size_t k = 0; k < f.size(); ++k) f[k] += w[j] * (*g[j])[k];
  }
  if (!any) return std::nullopt;
  return f;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("cosine: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += a[k] * b[k];
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double cosine(const TupleSignature& a, const TupleSignature& b) {
  if (!a || !b) return 0.0;
  return cosine(std::span<const double>(*a), std::span<const double>(*b));
}

std::vector<AttributeEmbedding> SignatureModel::attribute_embeddings(const Tuple& tuple) const {
  if (tuple.attributes.size() != encoders.size()) throw Error("tuple width does not match model");
  std::vector<AttributeEmbedding> g(encoders.size());
  for (std::size_t j = 0; j < encoders.size(); ++j) {
    // Attributes no signature uses are skipped.
    bool used = false;
    for (std::size_t s = 0; s < weights.signature_count(); ++s) used |= weights.row(s)[j] != 0.0;
    if (used) g[j] = encode_attribute(encoders[j], embeddings, tuple.attributes[j]);
  }
  return g;
}

std::vector<TupleSignature> SignatureModel::signatures(const Tuple& tuple) const {
  const auto g = attribute_embeddings(tuple);
  std::vector<TupleSignature> out;
  out.reserve(signature_count());
  for (std::size_t s = 0; s < signature_count(); ++s) out.push_back(compute_signature(weights.row(s), g));
  return out;
}

double tuple_similarity(const std::vector<TupleSignature>& x, const std::vector<TupleSignature>& y) {
  if (x.size() != y.size()) throw Error("signature count mismatch");
  double best = 0.0;
  bool first = true;
  for (std::size_t s = 0; s < x.size(); ++s) {
    const double c = cosine(x[s], y[s]);
    if (first || c > best) best = c;
    first = false;
  }
  return best;
}

double tuple_similarity(const SignatureModel& model, const Tuple& x, const Tuple& y) {
  return tuple_similarity(model.signatures(x), model.signatures(y));
}

}  // namespace autoblock
