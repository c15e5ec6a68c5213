#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "autoblock/data_model.hpp"
#include "autoblock/random.hpp"
#include "autoblock/text_embedding.hpp"

namespace autoblock {

struct EncoderConfig {
  std::size_t input_dim = 64;
  std::size_t hidden = 64;  // per direction
  double rho = 0.0;         // attention smoothing: 0 = plain mean, 1 = pure attention
  std::size_t max_tokens = 64;

  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

/// Name recorded in model files for the recurrent cell.
inline constexpr const char* kRecurrentCell = "lstm";

/// Bidirectional single-layer LSTM feeding a linear attention scorer.
///
/// Parameters live in one flat vector, per direction
///   W_x (4h x d, row-major), W_h (4h x h), b (4h)
/// with gate order [input, forget, cell, output], forward direction first,
/// then the 2h-dim attention vector w. Hidden state k is the concatenation
/// [forward_k ; backward_k].
class AttentionalEncoder {
 public:
  AttentionalEncoder() = default;
  explicit AttentionalEncoder(const EncoderConfig& config);

  /// Parameters uniform in [-scale, scale].
  static AttentionalEncoder random(const EncoderConfig& config, Rng& rng, double scale = 0.1);

  const EncoderConfig& config() const { return config_; }
  std::size_t input_dim() const { return config_.input_dim; }
  std::size_t hidden() const { return config_.hidden; }
  double rho() const { return config_.rho; }
  void set_rho(double rho);

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::size_t param_count() const { return params_.size(); }

  // Offsets into params() for direction 0 (forward) or 1 (backward).
  std::size_t wx_offset(int dir) const { return dir * direction_size(); }
  std::size_t wh_offset(int dir) const { return wx_offset(dir) + 4 * hidden() * input_dim(); }
  std::size_t bias_offset(int dir) const { return wh_offset(dir) + 4 * hidden() * hidden(); }
  std::size_t attention_offset() const { return 2 * direction_size(); }
  std::size_t direction_size() const {
    return 4 * hidden() * (input_dim() + hidden() + 1);
  }

  /// Attention does not depend on the recurrent part when rho == 0.
  bool uses_recurrence() const { return config_.rho != 0.0; }

  friend bool operator==(const AttentionalEncoder&, const AttentionalEncoder&) = default;

 private:
  EncoderConfig config_;
  std::vector<double> params_;
};

/// Forward activations kept for the backward pass.
struct EncoderTrace {
  std::size_t length = 0;
  bool recurrent = false;
  std::vector<double> inputs;  // l x d
  // Per direction, indexed by position: gates (l x 4h, activated), cell
  // state, tanh(cell), hidden.
  std::vector<double> gates[2];
  std::vector<double> cell[2];
  std::vector<double> cell_tanh[2];
  std::vector<double> hidden[2];
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> output;  // d
};

/// Runs the encoder over l token vectors (row-major l x d); l >= 1.
void encoder_forward(const AttentionalEncoder& encoder, std::span<const double> inputs,
                     std::size_t length, EncoderTrace& trace);

/// Accumulates parameter gradients into d_params and input gradients into
/// d_inputs (l x d; may be empty to skip) given dL/d(output).
void encoder_backward(const AttentionalEncoder& encoder, const EncoderTrace& trace,
                      std::span<const double> d_output, std::span<double> d_params,
                      std::span<double> d_inputs);

/// Hidden states h_1..h_l (row-major l x 2h).
std::vector<double> seq_encode(const AttentionalEncoder& encoder,
                               const std::vector<TokenVector>& tokens);

/// Smoothed attention weights beta_k = rho * softmax(w . h)_k + (1 - rho) / l.
std::vector<double> attention_weights(const AttentionalEncoder& encoder,
                                      std::span<const double> hidden_states, std::size_t length);

using AttributeEmbedding = std::optional<std::vector<double>>;

/// Weighted token-vector average; missing in, missing out. Sequences
/// longer than max_tokens are truncated at the tail.
AttributeEmbedding encode_attribute(const AttentionalEncoder& encoder, const EmbeddingTable& table,
                                    const AttributeValue& value);

/// Same as encode_attribute, also returning the weights (for inspection).
AttributeEmbedding encode_attribute(const AttentionalEncoder& encoder, const EmbeddingTable& table,
                                    const AttributeValue& value, std::vector<double>* beta);

}  // namespace autoblock
