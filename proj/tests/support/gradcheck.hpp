#pragma once

// Finite-difference check of the minibatch loss gradient.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "autoblock/training.hpp"

namespace autoblock::testing {

struct GradientCheck {
  double encoder_error = 0.0;    // worst norm-wise relative error over encoders
  double weight_error = 0.0;
  double embedding_error = 0.0;
  std::size_t checked = 0;       // parameters compared
  double worst() const { return std::max({encoder_error, weight_error, embedding_error}); }
};

inline double relative_error(const std::vector<double>& analytic, const std::vector<double>& numeric) {
  double diff = 0.0, a = 0.0, n = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
    a += analytic[i] * analytic[i];
    n += numeric[i] * numeric[i];
  }
  const double scale = std::max({std::sqrt(a), std::sqrt(n), 1e-12});
  return std::sqrt(diff) / scale;
}

inline std::string random_word(Rng& rng) {
  static const char* letters = "abcdefgh";
  std::string w;
  const std::size_t len = 2 + rng.below(4);
  for (std::size_t i = 0; i < len; ++i) w += letters[rng.below(8)];
  return w;
}

/// Random instance: d=8, h=4, tokens per value <= 5, two positives with
/// |U| = 2 negatives each, smoothing in (0.2, 0.9) so the recurrence is on.
inline GradientCheck check_gradient(std::uint64_t seed) {
  Rng rng(seed);
  const std::vector<std::string> schema{"a", "b"};
  Dataset dataset(schema);
  Table table;
  for (std::size_t t = 0; t < 8; ++t) {
    Tuple tuple;
    tuple.record_id = "t" + std::to_string(t);
    for (std::size_t j = 0; j < schema.size(); ++j) {
      AttributeValue v;
      const std::size_t l = 1 + rng.below(5);
      for (std::size_t k = 0; k < l; ++k) v.tokens.push_back(random_word(rng));
      tuple.attributes.push_back(v);
    }
    table.tuples.push_back(tuple);
  }
  dataset.add_table(table);

  ModelConfig mc;
  mc.embedding.dim = 8;
  mc.embedding.bucket_count = 64;
  mc.hidden = 4;
  mc.init_scale = 0.5;
  mc.rho = {rng.uniform(0.2, 0.9), rng.uniform(0.2, 0.9)};
  SignatureModel model = initialize_model(schema, mc, seed);
  // Larger embedding rows than the default init so cosines move visibly.
  for (double& x : model.embeddings.rows()) x = rng.uniform(-0.5, 0.5);
  model.weights.append_row(std::vector<double>{rng.uniform(0.3, 1.0), rng.uniform(0.3, 1.0)});

  Minibatch batch;
  batch.positives = {{0, 1}, {2, 3}};
  batch.negatives = {sample_negatives(8, 0, 1, 2, rng), sample_negatives(8, 2, 3, 2, rng)};
  const double tau = rng.uniform(0.5, 1.0);
  const std::vector<bool> trainable{true, true};
  const TokenizedCorpus corpus(dataset, model.embeddings, mc.max_tokens);

  GradientTape tape(model);
  minibatch_loss(model, corpus, batch, 0, tau, trainable, &tape);
  auto loss = [&] { return minibatch_loss(model, corpus, batch, 0, tau, trainable)->loss; };
  const double h = 1e-5;
  auto numeric = [&](double& x) {
    const double saved = x;
    x = saved + h;
    const double up = loss();
    x = saved - h;
    const double down = loss();
    x = saved;
    return (up - down) / (2 * h);
  };

  GradientCheck result;
  for (std::size_t j = 0; j < schema.size(); ++j) {
    std::vector<double> num;
    for (double& p : model.encoders[j].params()) num.push_back(numeric(p));
    result.encoder_error = std::max(result.encoder_error, relative_error(tape.encoder_grads()[j], num));
    result.checked += num.size();
  }
  {
    std::vector<double> num;
    for (double& w : model.weights.row(0)) num.push_back(numeric(w));
    result.weight_error = relative_error(tape.weight_grad(), num);
    result.checked += num.size();
  }
  {
    // Every row: untouched rows must have zero numeric gradient too.
    std::vector<double> analytic(model.embeddings.rows().size(), 0.0), num;
    const std::size_t d = model.embeddings.dim();
    for (std::size_t slot = 0; slot < tape.touched_rows().size(); ++slot) {
      auto g = tape.row_grad(slot);
      std::copy(g.begin(), g.end(), analytic.begin() + static_cast<std::ptrdiff_t>(tape.touched_rows()[slot] * d));
    }
    for (double& x : model.embeddings.rows()) num.push_back(numeric(x));
    result.embedding_error = relative_error(analytic, num);
    result.checked += num.size();
  }
  return result;
}

}  // namespace autoblock::testing
