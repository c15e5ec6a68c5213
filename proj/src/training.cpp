#include "autoblock/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_set>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "autoblock/error.hpp"

namespace autoblock {

void TrainingConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError("train." + field + ": " + why);
  };
  if (max_iterations == 0) fail("max_iterations", "must be positive");
  if (negatives == 0) fail("negatives", "must be positive");
  if (batch_size == 0) fail("batch_size", "must be positive");
  if (!(learning_rate > 0.0)) fail("learning_rate", "must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) fail("beta1", "must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) fail("beta2", "must lie in [0, 1)");
  if (!(epsilon > 0.0)) fail("epsilon", "must be positive");
  if (!(temperature > 0.0)) fail("temperature", "must be positive");
}

void ModelConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError("model." + field + ": " + why);
  };
  if (embedding.dim == 0) fail("dim", "must be positive");
  if (embedding.bucket_count == 0 || (embedding.bucket_count & (embedding.bucket_count - 1)) != 0)
    fail("buckets", "must be a power of two");
  if (embedding.min_n < 1 || embedding.min_n > embedding.max_n) fail("min_n/max_n", "need 1 <= min_n <= max_n");
  if (hidden == 0) fail("hidden", "must be positive");
  if (max_tokens == 0) fail("max_tokens", "must be positive");
  for (double r : rho)
    if (!(r >= 0.0 && r <= 1.0)) fail("rho", "values must lie in [0, 1]");
  if (!(init_scale > 0.0)) fail("init_scale", "must be positive");
}

SignatureModel initialize_model(const std::vector<std::string>& schema, const ModelConfig& config,
                                std::uint64_t seed) {
  config.validate();
  if (schema.empty()) throw ConfigError("schema has no attributes");
  if (!config.rho.empty() && config.rho.size() != schema.size()) {
    throw ConfigError("model.rho: expected " + std::to_string(schema.size()) + " values, got " +
                      std::to_string(config.rho.size()));
  }
  SignatureModel model;
  model.schema = schema;
  const std::uint64_t embed_seed = mix64(seed ^ 0x656d626564ULL);
  model.embeddings = config.pretrained_path.empty()
                         ? EmbeddingTable(config.embedding, embed_seed)
                         : load_pretrained(config.pretrained_path, config.embedding, embed_seed);

  std::size_t primary = 0;
  if (!config.primary_attribute.empty()) {
    auto it = std::find(schema.begin(), schema.end(), config.primary_attribute);
    if (it == schema.end()) {
      throw ConfigError("model.primary_attribute: '" + config.primary_attribute + "' not in schema");
    }
    primary = static_cast<std::size_t>(it - schema.begin());
  } else if (auto it = std::find(schema.begin(), schema.end(), "title"); it != schema.end()) {
    primary = static_cast<std::size_t>(it - schema.begin());
  }

  Rng rng(mix64(seed ^ 0x656e636f646572ULL));
  for (std::size_t j = 0; j < schema.size(); ++j) {
    EncoderConfig ec;
    ec.input_dim = model.embeddings.dim();
    ec.hidden = config.hidden;
    ec.max_tokens = config.max_tokens;
    ec.rho = config.rho.empty() ? (j == primary ? 1.0 : 0.0) : config.rho[j];
    model.encoders.push_back(AttentionalEncoder::random(ec, rng, config.init_scale));
  }
  model.weights = SignatureWeights(schema.size());
  return model;
}

std::vector<double> selection_probabilities(std::span<const double> cosines, double temperature) {
  if (cosines.empty()) throw Error("selection_probabilities: no scores");
  double max_score = -INFINITY;
  for (double c : cosines) max_score = std::max(max_score, c / temperature);
  std::vector<double> p(cosines.size());
  double total = 0.0;
  for (std::size_t r = 0; r < cosines.size(); ++r) {
    p[r] = std::exp(cosines[r] / temperature - max_score);
    total += p[r];
  }
  for (double& x : p) x /= total;
  return p;
}

double selection_probability(double positive_cosine, std::span<const double> negative_cosines,
                             double temperature) {
  std::vector<double> scores{positive_cosine};
  scores.insert(scores.end(), negative_cosines.begin(), negative_cosines.end());
  return selection_probabilities(scores, temperature)[0];
}

std::vector<std::size_t> sample_negatives(std::size_t n, std::size_t i, std::size_t j,
                                          std::size_t k, Rng& rng) {
  if (i == j || i >= n || j >= n) throw Error("sample_negatives: invalid pair");
  const std::size_t pool = n - 2;
  k = std::min(k, pool);
  const std::size_t lo = std::min(i, j), hi = std::max(i, j);
  auto to_index = [&](std::size_t x) {
    if (x >= lo) ++x;
    if (x >= hi) ++x;
    return x;
  };
  // Floyd's sampling over the pool [0, n - 2).
  std::vector<std::size_t> picked;
  std::unordered_set<std::size_t> seen;
  for (std::size_t r = pool - k; r < pool; ++r) {
    const std::size_t t = rng.below(r + 1);
    const std::size_t choice = seen.count(t) ? r : t;
    seen.insert(choice);
    picked.push_back(to_index(choice));
  }
  return picked;
}

std::vector<double> project_weights(std::span<const double> w, const std::vector<bool>& usable) {
  if (usable.size() != w.size()) throw Error("project_weights: mask size mismatch");
  const std::size_t count = static_cast<std::size_t>(std::count(usable.begin(), usable.end(), true));
  if (count == 0) throw Error("project_weights: no usable attributes");
  std::vector<double> out(w.size(), 0.0);
  double norm = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (usable[j] && w[j] > 0.0) {
      out[j] = w[j];
      norm += w[j] * w[j];
    }
  }
  if (norm == 0.0) {
    for (std::size_t j = 0; j < w.size(); ++j) out[j] = usable[j] ? 1.0 : 0.0;
    norm = static_cast<double>(count);
  }
  norm = std::sqrt(norm);
  for (double& x : out) x /= norm;
  return out;
}

TokenizedCorpus::TokenizedCorpus(const Dataset& dataset, const EmbeddingTable& table,
                                 std::size_t max_tokens)
    : tuples_(dataset.size()), attributes_(dataset.attribute_count()) {
  std::unordered_map<std::string, std::uint32_t> ids;
  offsets_.reserve(tuples_ * attributes_ + 1);
  offsets_.push_back(0);
  for (std::size_t t = 0; t < tuples_; ++t) {
    const Tuple& tuple = dataset.tuple(t);
    for (std::size_t j = 0; j < attributes_; ++j) {
      const auto& tokens = tuple.attributes[j].tokens;
      const std::size_t l = std::min(tokens.size(), max_tokens);
      for (std::size_t k = 0; k < l; ++k) {
        auto [it, inserted] = ids.emplace(tokens[k], static_cast<std::uint32_t>(vocab_.size()));
        if (inserted) {
          vocab_.push_back(tokens[k]);
          buckets_.push_back(table.buckets(tokens[k]));
          pretrained_.push_back(table.pretrained(tokens[k]));
        }
        token_ids_.push_back(it->second);
      }
      offsets_.push_back(token_ids_.size());
    }
  }
}

GradientTape::GradientTape(const SignatureModel& model)
    : dim_(model.embeddings.dim()), weight_grad_(model.schema.size(), 0.0) {
  for (const auto& enc : model.encoders) encoder_grads_.emplace_back(enc.param_count(), 0.0);
}

std::span<double> GradientTape::row(std::uint32_t bucket) {
  auto [it, inserted] = slot_.emplace(bucket, rows_.size());
  if (inserted) {
    rows_.push_back(bucket);
    row_values_.resize(row_values_.size() + dim_, 0.0);
  }
  return {row_values_.data() + it->second * dim_, dim_};
}

void GradientTape::add(const GradientTape& other) {
  for (std::size_t j = 0; j < encoder_grads_.size(); ++j) {
    auto& dst = encoder_grads_[j];
    const auto& src = other.encoder_grads_[j];
    for (std::size_t p = 0; p < dst.size(); ++p) dst[p] += src[p];
  }
  for (std::size_t j = 0; j < weight_grad_.size(); ++j) weight_grad_[j] += other.weight_grad_[j];
  for (std::size_t slot = 0; slot < other.rows_.size(); ++slot) {
    auto dst = row(other.rows_[slot]);
    auto src = other.row_grad(slot);
    for (std::size_t k = 0; k < dim_; ++k) dst[k] += src[k];
  }
}

void GradientTape::clear() {
  for (auto& g : encoder_grads_) std::fill(g.begin(), g.end(), 0.0);
  std::fill(weight_grad_.begin(), weight_grad_.end(), 0.0);
  rows_.clear();
  row_values_.clear();
  slot_.clear();
}

namespace {

struct TupleWork {
  std::size_t tuple = 0;
  std::vector<EncoderTrace> traces;  // per attribute; length 0 = not computed
  std::optional<std::vector<double>> signature;
  std::vector<double> d_signature;
};

void forward_tuple(const SignatureModel& model, const TokenizedCorpus& corpus, std::size_t s,
                   const std::vector<bool>& active, TupleWork& work) {
  const std::size_t m = model.schema.size(), d = model.embeddings.dim();
  auto w = model.weights.row(s);
  work.traces.assign(m, EncoderTrace{});
  work.signature.reset();
  std::vector<double> inputs;
  for (std::size_t j = 0; j < m; ++j) {
    if (!active[j] || corpus.missing(work.tuple, j)) continue;
    auto tokens = corpus.tokens(work.tuple, j);
    inputs.assign(tokens.size() * d, 0.0);
    for (std::size_t k = 0; k < tokens.size(); ++k) {
      double* v = inputs.data() + k * d;
      if (const double* p = corpus.pretrained(tokens[k])) {
        std::copy(p, p + d, v);
        continue;
      }
      for (std::uint32_t b : corpus.buckets(tokens[k])) {
        auto row = model.embeddings.row(b);
        for (std::size_t i = 0; i < d; ++i) v[i] += row[i];
      }
    }
    encoder_forward(model.encoders[j], inputs, tokens.size(), work.traces[j]);
    if (w[j] != 0.0) {
      if (!work.signature) work.signature.emplace(d, 0.0);
      const auto& g = work.traces[j].output;
      for (std::size_t i = 0; i < d; ++i) (*work.signature)[i] += w[j] * g[i];
    }
  }
  work.d_signature.assign(work.signature ? d : 0, 0.0);
}

void backward_tuple(const SignatureModel& model, const TokenizedCorpus& corpus, std::size_t s,
                    const TupleWork& work, GradientTape& tape) {
  if (!work.signature) return;
  const std::size_t m = model.schema.size(), d = model.embeddings.dim();
  auto w = model.weights.row(s);
  const auto& df = work.d_signature;
  std::vector<double> dg(d), d_inputs;
  for (std::size_t j = 0; j < m; ++j) {
    const EncoderTrace& tr = work.traces[j];
    if (tr.length == 0) continue;
    double dot = 0.0;
    for (std::size_t i = 0; i < d; ++i) dot += df[i] * tr.output[i];
    tape.weight_grad()[j] += dot;
    if (w[j] == 0.0) continue;
    for (std::size_t i = 0; i < d; ++i) dg[i] = w[j] * df[i];
    const bool embed_grad = model.embeddings.trainable();
    d_inputs.assign(embed_grad ? tr.length * d : 0, 0.0);
    encoder_backward(model.encoders[j], tr, dg, tape.encoder_grads()[j], d_inputs);
    if (!embed_grad) continue;
    auto tokens = corpus.tokens(work.tuple, j);
    for (std::size_t k = 0; k < tr.length; ++k) {
      if (corpus.pretrained(tokens[k])) continue;
      const double* dv = d_inputs.data() + k * d;
      for (std::uint32_t b : corpus.buckets(tokens[k])) {
        auto row = tape.row(b);
        for (std::size_t i = 0; i < d; ++i) row[i] += dv[i];
      }
    }
  }
}

// Cosine and its gradients with respect to both arguments.
double cosine_with_grad(const std::vector<double>& a, const std::vector<double>& b,
                        std::vector<double>* da, std::vector<double>* db, double scale) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  const double inv = 1.0 / std::sqrt(na * nb);
  const double c = dot * inv;
  if (scale != 0.0) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (da) (*da)[i] += scale * (b[i] * inv - c * a[i] / na);
      if (db) (*db)[i] += scale * (a[i] * inv - c * b[i] / nb);
    }
  }
  return c;
}

constexpr std::size_t kChunk = 8;

}  // namespace

std::optional<BatchLoss> minibatch_loss(const SignatureModel& model, const TokenizedCorpus& corpus,
                                        const Minibatch& batch, std::size_t s, double temperature,
                                        const std::vector<bool>& trainable, GradientTape* tape) {
  const std::size_t m = model.schema.size();
  if (s >= model.signature_count()) throw Error("minibatch_loss: signature index out of range");
  if (batch.negatives.size() != batch.positives.size()) throw Error("minibatch_loss: batch shape");
  std::vector<bool> active(m);
  for (std::size_t j = 0; j < m; ++j)
    active[j] = model.weights.row(s)[j] != 0.0 || (j < trainable.size() && trainable[j]);

  std::vector<TupleWork> works;
  std::unordered_map<std::size_t, std::size_t> slot;
  auto enlist = [&](std::size_t t) {
    if (slot.emplace(t, works.size()).second) {
      works.emplace_back();
      works.back().tuple = t;
    }
  };
  for (std::size_t p = 0; p < batch.positives.size(); ++p) {
    enlist(batch.positives[p].first);
    enlist(batch.positives[p].second);
    for (std::size_t u : batch.negatives[p]) enlist(u);
  }

  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(works.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) forward_tuple(model, corpus, s, active, works[i]);

  // Applicability filtering, then the per-pair softmax.
  struct Term {
    std::size_t a, b;
    std::vector<std::size_t> negatives;
  };
  std::vector<Term> terms;
  for (std::size_t p = 0; p < batch.positives.size(); ++p) {
    const std::size_t a = slot[batch.positives[p].first], b = slot[batch.positives[p].second];
    if (!works[a].signature || !works[b].signature) continue;
    Term term{a, b, {}};
    for (std::size_t u : batch.negatives[p]) {
      const std::size_t k = slot[u];
      if (works[k].signature) term.negatives.push_back(k);
    }
    terms.push_back(std::move(term));
  }
  if (terms.empty()) return std::nullopt;

  const double inv_batch = 1.0 / static_cast<double>(terms.size());
  const double tau = temperature;
  double total = 0.0;
  std::vector<double> cosines;
  for (const Term& term : terms) {
    const auto& fa = *works[term.a].signature;
    const auto& fb = *works[term.b].signature;
    cosines.assign(1, cosine_with_grad(fa, fb, nullptr, nullptr, 0.0));
    for (std::size_t k : term.negatives) {
      cosines.push_back(cosine_with_grad(fa, *works[k].signature, nullptr, nullptr, 0.0));
      cosines.push_back(cosine_with_grad(fb, *works[k].signature, nullptr, nullptr, 0.0));
    }
    const std::vector<double> p = selection_probabilities(cosines, tau);
    double max_score = -INFINITY;
    for (double c : cosines) max_score = std::max(max_score, c / tau);
    double sum = 0.0;
    for (double c : cosines) sum += std::exp(c / tau - max_score);
    total += -(cosines[0] / tau - max_score - std::log(sum));

    if (!tape) continue;
    // dL/dcos_r = -(1/B) (delta_r0 - p_r) / tau
    auto& da = works[term.a].d_signature;
    auto& db = works[term.b].d_signature;
    cosine_with_grad(fa, fb, &da, &db, -inv_batch * (1.0 - p[0]) / tau);
    std::size_t r = 1;
    for (std::size_t k : term.negatives) {
      auto& dk = works[k].d_signature;
      const auto& fk = *works[k].signature;
      cosine_with_grad(fa, fk, &da, &dk, inv_batch * p[r++] / tau);
      cosine_with_grad(fb, fk, &db, &dk, inv_batch * p[r++] / tau);
    }
  }

  if (tape) {
    const std::size_t chunks = (works.size() + kChunk - 1) / kChunk;
    std::vector<GradientTape> partial(chunks, GradientTape(model));
    const std::ptrdiff_t chunk_count = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t c = 0; c < chunk_count; ++c) {
      const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
      const std::size_t end = std::min(works.size(), begin + kChunk);
      for (std::size_t i = begin; i < end; ++i) backward_tuple(model, corpus, s, works[i], partial[c]);
    }
    for (const auto& part : partial) tape->add(part);
  }
  return BatchLoss{total * inv_batch, terms.size()};
}

namespace {

class Adam {
 public:
  Adam(const TrainingConfig& config) : config_(config) {}

  void begin_step() {
    ++t_;
    correction1_ = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    correction2_ = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  }

  // Updates params[offset .. offset + grad.size()) with its own moment slots.
  void update(std::vector<double>& m, std::vector<double>& v, std::span<double> params,
              std::span<const double> grad, std::size_t offset = 0) {
    const double b1 = config_.beta1, b2 = config_.beta2, lr = config_.learning_rate;
    for (std::size_t i = 0; i < grad.size(); ++i) {
      const std::size_t k = offset + i;
      m[k] = b1 * m[k] + (1.0 - b1) * grad[i];
      v[k] = b2 * v[k] + (1.0 - b2) * grad[i] * grad[i];
      const double mh = m[k] / correction1_;
      const double vh = v[k] / correction2_;
      params[i] -= lr * mh / (std::sqrt(vh) + config_.epsilon);
    }
  }

 private:
  TrainingConfig config_;
  std::size_t t_ = 0;
  double correction1_ = 1.0, correction2_ = 1.0;
};

std::string format_line(std::size_t step, std::size_t s, double loss, std::size_t usable,
                        std::size_t pairs) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "step=%zu signature=%zu loss=%.6f usable=%zu pairs=%zu", step,
                s + 1, loss, usable, pairs);
  return buf;
}

}  // namespace

void train_signatures(SignatureModel& model, const Dataset& dataset, const LabelSet& labels,
                      const TrainingConfig& config, const TrainingLog& log) {
  config.validate();
  const std::size_t m = model.schema.size();
  if (dataset.schema() != model.schema) throw Error("training data schema does not match the model");
  if (labels.empty()) throw Error("training needs at least one positive label");
  if (dataset.size() < 3) throw Error("training needs at least three tuples");

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& [a, b] : labels.pairs()) {
    auto ia = dataset.find(a), ib = dataset.find(b);
    if (!ia || !ib) throw Error("label (" + a + ", " + b + ") names a tuple outside the training set");
    pairs.emplace_back(*ia, *ib);
  }
  std::size_t batch_size = config.batch_size;
  if (batch_size > pairs.size()) {
    if (log) {
      log("note: batch_size " + std::to_string(batch_size) + " exceeds " +
          std::to_string(pairs.size()) + " labels; using " + std::to_string(pairs.size()));
    }
    batch_size = pairs.size();
  }

  const std::size_t max_tokens = model.encoders.empty() ? 64 : model.encoders[0].config().max_tokens;
  const TokenizedCorpus corpus(dataset, model.embeddings, max_tokens);
  const std::size_t max_signatures = config.max_signatures ? config.max_signatures : m;

  Rng rng(mix64(config.seed ^ 0x747261696eULL));
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::size_t cursor = 0;

  std::vector<bool> usable(m, true);
  for (std::size_t s0 = 0; s0 < model.signature_count(); ++s0)
    for (std::size_t j : model.weights.support(s0)) usable[j] = false;

  const std::size_t d = model.embeddings.dim();
  for (std::size_t s = model.signature_count(); s < max_signatures; ++s) {
    if (std::none_of(usable.begin(), usable.end(), [](bool u) { return u; })) break;
    std::vector<double> init(m, 0.0);
    model.weights.append_row(project_weights(init, usable));

    Adam adam(config);
    std::vector<std::vector<double>> enc_m, enc_v;
    for (const auto& enc : model.encoders) {
      enc_m.emplace_back(enc.param_count(), 0.0);
      enc_v.emplace_back(enc.param_count(), 0.0);
    }
    std::vector<double> w_m(m, 0.0), w_v(m, 0.0);
    std::vector<double> row_m, row_v;
    if (model.embeddings.trainable()) {
      row_m.assign(model.embeddings.rows().size(), 0.0);
      row_v.assign(model.embeddings.rows().size(), 0.0);
    }

    GradientTape tape(model);
    double running = 0.0;
    std::size_t running_count = 0, running_pairs = 0;
    for (std::size_t step = 1; step <= config.max_iterations; ++step) {
      Minibatch batch;
      for (std::size_t b = 0; b < batch_size; ++b) {
        if (cursor == order.size()) {
          rng.shuffle(order);
          cursor = 0;
        }
        const auto& pr = pairs[order[cursor++]];
        batch.positives.push_back(pr);
        batch.negatives.push_back(sample_negatives(dataset.size(), pr.first, pr.second,
                                                   config.negatives, rng));
      }

      tape.clear();
      auto result = minibatch_loss(model, corpus, batch, s, config.temperature, usable, &tape);
      if (!result) {
        if (log) log("warning: step " + std::to_string(step) + " signature " + std::to_string(s + 1) +
                     ": no applicable pairs in batch, skipped");
        continue;
      }
      running += result->loss;
      running_pairs += result->pairs_used;
      ++running_count;

      adam.begin_step();
      for (std::size_t j = 0; j < m; ++j) {
        if (!usable[j] || model.weights.row(s)[j] == 0.0 || !model.encoders[j].uses_recurrence()) continue;
        adam.update(enc_m[j], enc_v[j], model.encoders[j].params(), tape.encoder_grads()[j]);
      }
      {
        std::vector<double> grad = tape.weight_grad();
        for (std::size_t j = 0; j < m; ++j)
          if (!usable[j]) grad[j] = 0.0;
        adam.update(w_m, w_v, model.weights.row(s), grad);
        const auto projected = project_weights(model.weights.row(s), usable);
        std::copy(projected.begin(), projected.end(), model.weights.row(s).begin());
      }
      if (model.embeddings.trainable()) {
        const auto& rows = tape.touched_rows();
        for (std::size_t slot = 0; slot < rows.size(); ++slot) {
          adam.update(row_m, row_v, model.embeddings.row(rows[slot]), tape.row_grad(slot),
                      static_cast<std::size_t>(rows[slot]) * d);
        }
      }

      if (log && config.log_every && (step % config.log_every == 0 || step == config.max_iterations)) {
        const std::size_t usable_count =
            static_cast<std::size_t>(std::count(usable.begin(), usable.end(), true));
        log(format_line(step, s, running / static_cast<double>(running_count), usable_count,
                        running_pairs / running_count));
        running = 0.0;
        running_count = running_pairs = 0;
      }
    }

    // Entries at or below the support threshold are dropped, as are
    // attributes outside the usable set.
    auto row = model.weights.row(s);
    for (std::size_t j = 0; j < m; ++j)
      if (!usable[j] || row[j] <= kSupportThreshold) row[j] = 0.0;
    const auto finalized = project_weights(row, usable);
    std::copy(finalized.begin(), finalized.end(), row.begin());
    for (std::size_t j : model.weights.support(s, 0.0)) usable[j] = false;
    if (log) {
      std::string support;
      for (std::size_t j : model.weights.support(s, 0.0)) {
        if (!support.empty()) support += ",";
        support += model.schema[j];
      }
      log("signature " + std::to_string(s + 1) + " support={" + support + "}");
    }
  }
}

SignatureModel train(const Dataset& dataset, const LabelSet& labels, const ModelConfig& model_config,
                     const TrainingConfig& config, const TrainingLog& log) {
  config.validate();
  SignatureModel model = initialize_model(dataset.schema(), model_config, config.seed);
  train_signatures(model, dataset, labels, config, log);
  return model;
}

}  // namespace autoblock
