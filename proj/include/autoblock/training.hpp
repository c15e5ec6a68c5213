#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "autoblock/data_model.hpp"
#include "autoblock/random.hpp"
#include "autoblock/signatures.hpp"

namespace autoblock {

struct TrainingConfig {
  std::size_t max_iterations = 2000;  // T, optimizer steps per signature
  std::size_t max_signatures = 0;     // 0 = number of attributes
  std::size_t negatives = 10;         // |U| per positive pair
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double temperature = 1.0;
  std::uint64_t seed = 1;
  std::size_t log_every = 100;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct ModelConfig {
  EmbeddingConfig embedding;
  std::size_t hidden = 64;
  std::size_t max_tokens = 64;
  /// Per-attribute smoothing; empty selects 1 for the primary attribute and
  /// 0 for every other one.
  std::vector<double> rho;
  /// Defaults to "title" when the schema has one, else the first attribute.
  std::string primary_attribute;
  double init_scale = 0.1;
  /// Optional text file of pretrained word vectors (frozen).
  std::string pretrained_path;

  void validate() const;
};

/// Fresh model: embedding table, one encoder per attribute, no signatures.
SignatureModel initialize_model(const std::vector<std::string>& schema, const ModelConfig& config,
                                std::uint64_t seed);

/// Softmax over the 2|U|+1 pair scores (cosines / tau). Entry 0 is
/// the labelled pair.
std::vector<double> selection_probabilities(std::span<const double> cosines, double temperature);

/// Probability that the labelled pair is picked: positive_cosine against
/// the 2|U| negative cosines.
double selection_probability(double positive_cosine, std::span<const double> negative_cosines,
                             double temperature = 1.0);

/// k indices drawn uniformly without replacement from [0, n) \ {i, j}.
/// k is clamped to n - 2.
std::vector<std::size_t> sample_negatives(std::size_t n, std::size_t i, std::size_t j,
                                          std::size_t k, Rng& rng);

/// Zero outside `usable`, clamp negatives, L2-normalize; all-zero falls back
/// to uniform over `usable`. Throws when `usable` is empty.
std::vector<double> project_weights(std::span<const double> w, const std::vector<bool>& usable);

/// Per-tuple token ids and their n-gram rows, resolved once per dataset.
class TokenizedCorpus {
 public:
  TokenizedCorpus(const Dataset& dataset, const EmbeddingTable& table, std::size_t max_tokens);

  std::size_t tuple_count() const { return tuples_; }
  std::size_t attribute_count() const { return attributes_; }
  std::span<const std::uint32_t> tokens(std::size_t tuple, std::size_t attribute) const {
    const std::size_t cell = tuple * attributes_ + attribute;
    return {token_ids_.data() + offsets_[cell], offsets_[cell + 1] - offsets_[cell]};
  }
  bool missing(std::size_t tuple, std::size_t attribute) const {
    return tokens(tuple, attribute).empty();
  }
  const std::vector<std::uint32_t>& buckets(std::uint32_t token) const { return buckets_[token]; }
  /// Pretrained vector of a token or nullptr.
  const double* pretrained(std::uint32_t token) const { return pretrained_[token]; }
  const std::string& token_text(std::uint32_t token) const { return vocab_[token]; }

 private:
  std::size_t tuples_ = 0;
  std::size_t attributes_ = 0;
  std::vector<std::string> vocab_;
  std::vector<std::vector<std::uint32_t>> buckets_;
  std::vector<const double*> pretrained_;
  std::vector<std::uint32_t> token_ids_;
  std::vector<std::size_t> offsets_;
};

/// Adjoints for one minibatch: encoder parameters, the current signature's
/// weight row, and the embedding rows the batch touched.
class GradientTape {
 public:
  GradientTape() = default;
  GradientTape(const SignatureModel& model);

  std::vector<std::vector<double>>& encoder_grads() { return encoder_grads_; }
  const std::vector<std::vector<double>>& encoder_grads() const { return encoder_grads_; }
  std::vector<double>& weight_grad() { return weight_grad_; }
  const std::vector<double>& weight_grad() const { return weight_grad_; }

  /// Adjoint of embedding row `bucket`, created zeroed on first touch.
  std::span<double> row(std::uint32_t bucket);
  const std::vector<std::uint32_t>& touched_rows() const { return rows_; }
  std::span<const double> row_grad(std::size_t slot) const {
    return {row_values_.data() + slot * dim_, dim_};
  }

  /// Adds `other` in its insertion order (deterministic reduction).
  void add(const GradientTape& other);
  void clear();

 private:
  std::size_t dim_ = 0;
  std::vector<std::vector<double>> encoder_grads_;
  std::vector<double> weight_grad_;
  std::vector<std::uint32_t> rows_;
  std::vector<double> row_values_;
  std::unordered_map<std::uint32_t, std::size_t> slot_;
};

struct Minibatch {
  std::vector<std::pair<std::size_t, std::size_t>> positives;
  std::vector<std::vector<std::size_t>> negatives;  // one U per positive pair
};

struct BatchLoss {
  double loss = 0.0;
  std::size_t pairs_used = 0;  // positives left after applicability filtering
};

/// -(1/|B|) sum log P_s over the applicable pairs of the batch for
/// signature row `s`. Attributes flagged in `trainable` receive weight
/// gradients even when their weight is currently zero. Returns nullopt
/// when filtering empties the batch. Gradients go to `tape` when given.
std::optional<BatchLoss> minibatch_loss(const SignatureModel& model, const TokenizedCorpus& corpus,
                                        const Minibatch& batch, std::size_t s, double temperature,
                                        const std::vector<bool>& trainable,
                                        GradientTape* tape = nullptr);

using TrainingLog = std::function<void(const std::string&)>;

/// Sequential orthogonal training: one signature at a time, each restricted
/// to the attributes earlier signatures left unused.
SignatureModel train(const Dataset& dataset, const LabelSet& labels, const ModelConfig& model_config,
                     const TrainingConfig& config, const TrainingLog& log = {});

/// Continues from an initialized model (used by tests to control init).
void train_signatures(SignatureModel& model, const Dataset& dataset, const LabelSet& labels,
                      const TrainingConfig& config, const TrainingLog& log = {});

}  // namespace autoblock
