#include "autoblock/encoder.hpp"

#include <algorithm>
#include <cmath>

#include "autoblock/error.hpp"

namespace autoblock {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Step t of direction dir visits this position.
std::size_t position(int dir, std::size_t t, std::size_t length) {
  return dir == 0 ? t : length - 1 - t;
}

void run_direction(const AttentionalEncoder& enc, int dir, EncoderTrace& tr) {
  const std::size_t l = tr.length, d = enc.input_dim(), h = enc.hidden();
  const double* wx = enc.params().data() + enc.wx_offset(dir);
  const double* wh = enc.params().data() + enc.wh_offset(dir);
  const double* b = enc.params().data() + enc.bias_offset(dir);

  tr.gates[dir].assign(l * 4 * h, 0.0);
  tr.cell[dir].assign(l * h, 0.0);
  tr.cell_tanh[dir].assign(l * h, 0.0);
  tr.hidden[dir].assign(l * h, 0.0);

  std::vector<double> z(4 * h);
  const double* h_prev = nullptr;
  const double* c_prev = nullptr;
  for (std::size_t t = 0; t < l; ++t) {
    const std::size_t p = position(dir, t, l);
    const double* x = tr.inputs.data() + p * d;
    for (std::size_t r = 0; r < 4 * h; ++r) {
      double acc = b[r];
      const double* wr = wx + r * d;
      for (std::size_t k = 0; k < d; ++k) acc += wr[k] * x[k];
      if (h_prev) {
        const double* ur = wh + r * h;
        for (std::size_t k = 0; k < h; ++k) acc += ur[k] * h_prev[k];
      }
      z[r] = acc;
    }
    double* gates = tr.gates[dir].data() + p * 4 * h;
    double* c = tr.cell[dir].data() + p * h;
    double* tc = tr.cell_tanh[dir].data() + p * h;
    double* hh = tr.hidden[dir].data() + p * h;
    for (std::size_t u = 0; u < h; ++u) {
      const double i = sigmoid(z[u]);
      const double f = sigmoid(z[h + u]);
      const double g = std::tanh(z[2 * h + u]);
      const double o = sigmoid(z[3 * h + u]);
      gates[u] = i;
      gates[h + u] = f;
      gates[2 * h + u] = g;
      gates[3 * h + u] = o;
      c[u] = i * g + (c_prev ? f * c_prev[u] : 0.0);
      tc[u] = std::tanh(c[u]);
      hh[u] = o * tc[u];
    }
    h_prev = hh;
    c_prev = c;
  }
}

void backprop_direction(const AttentionalEncoder& enc, int dir, const EncoderTrace& tr,
                        const std::vector<double>& d_hidden, std::span<double> d_params,
                        std::span<double> d_inputs) {
  const std::size_t l = tr.length, d = enc.input_dim(), h = enc.hidden();
  const double* wx = enc.params().data() + enc.wx_offset(dir);
  const double* wh = enc.params().data() + enc.wh_offset(dir);
  double* dwx = d_params.data() + enc.wx_offset(dir);
  double* dwh = d_params.data() + enc.wh_offset(dir);
  double* db = d_params.data() + enc.bias_offset(dir);

  std::vector<double> dh_next(h, 0.0), dc_next(h, 0.0), dz(4 * h);
  for (std::size_t t = l; t-- > 0;) {
    const std::size_t p = position(dir, t, l);
    const bool has_prev = t > 0;
    const std::size_t prev = has_prev ? position(dir, t - 1, l) : 0;
    const double* gates = tr.gates[dir].data() + p * 4 * h;
    const double* tc = tr.cell_tanh[dir].data() + p * h;
    const double* c_prev = has_prev ? tr.cell[dir].data() + prev * h : nullptr;
    const double* h_prev = has_prev ? tr.hidden[dir].data() + prev * h : nullptr;

    for (std::size_t u = 0; u < h; ++u) {
      const double i = gates[u], f = gates[h + u], g = gates[2 * h + u], o = gates[3 * h + u];
      const double dh = d_hidden[p * h + u] + dh_next[u];
      const double d_o = dh * tc[u];
      const double dc = dh * o * (1.0 - tc[u] * tc[u]) + dc_next[u];
      const double d_i = dc * g;
      const double d_g = dc * i;
      const double d_f = c_prev ? dc * c_prev[u] : 0.0;
      dc_next[u] = dc * f;
      dz[u] = d_i * i * (1.0 - i);
      dz[h + u] = d_f * f * (1.0 - f);
      dz[2 * h + u] = d_g * (1.0 - g * g);
      dz[3 * h + u] = d_o * o * (1.0 - o);
    }

    const double* x = tr.inputs.data() + p * d;
    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    for (std::size_t r = 0; r < 4 * h; ++r) {
      const double g = dz[r];
      if (g == 0.0) continue;
      db[r] += g;
      double* dwr = dwx + r * d;
      for (std::size_t k = 0; k < d; ++k) dwr[k] += g * x[k];
      if (!d_inputs.empty()) {
        const double* wr = wx + r * d;
        double* dx = d_inputs.data() + p * d;
        for (std::size_t k = 0; k < d; ++k) dx[k] += g * wr[k];
      }
      if (h_prev) {
        double* dur = dwh + r * h;
        const double* ur = wh + r * h;
        for (std::size_t k = 0; k < h; ++k) {
          dur[k] += g * h_prev[k];
          dh_next[k] += g * ur[k];
        }
      }
    }
  }
}

}  // namespace

AttentionalEncoder::AttentionalEncoder(const EncoderConfig& config) : config_(config) {
  if (config_.input_dim == 0 || config_.hidden == 0) throw Error("encoder dimensions must be positive");
  if (config_.max_tokens == 0) throw Error("encoder max_tokens must be positive");
  set_rho(config_.rho);
  params_.assign(2 * direction_size() + 2 * hidden(), 0.0);
}

AttentionalEncoder AttentionalEncoder::random(const EncoderConfig& config, Rng& rng, double scale) {
  AttentionalEncoder enc(config);
  for (double& p : enc.params_) p = rng.uniform(-scale, scale);
  return enc;
}

void AttentionalEncoder::set_rho(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw Error("attention smoothing rho must lie in [0, 1]");
  config_.rho = rho;
}

void encoder_forward(const AttentionalEncoder& enc, std::span<const double> inputs,
                     std::size_t length, EncoderTrace& tr) {
  const std::size_t d = enc.input_dim(), h = enc.hidden();
  if (length == 0) throw Error("encoder input must hold at least one token");
  if (inputs.size() != length * d) throw Error("encoder input size mismatch");
  tr.length = length;
  tr.inputs.assign(inputs.begin(), inputs.end());
  tr.recurrent = enc.uses_recurrence();
  tr.alpha.assign(length, 1.0 / static_cast<double>(length));
  tr.beta.assign(length, 1.0 / static_cast<double>(length));

  if (tr.recurrent) {
    run_direction(enc, 0, tr);
    run_direction(enc, 1, tr);
    const double* w = enc.params().data() + enc.attention_offset();
    double max_score = -INFINITY;
    std::vector<double> scores(length);
    for (std::size_t k = 0; k < length; ++k) {
      double s = 0.0;
      for (std::size_t u = 0; u < h; ++u) {
        s += w[u] * tr.hidden[0][k * h + u] + w[h + u] * tr.hidden[1][k * h + u];
      }
      scores[k] = s;
      max_score = std::max(max_score, s);
    }
    double total = 0.0;
    for (std::size_t k = 0; k < length; ++k) {
      tr.alpha[k] = std::exp(scores[k] - max_score);
      total += tr.alpha[k];
    }
    const double rho = enc.rho();
    const double uniform = (1.0 - rho) / static_cast<double>(length);
    for (std::size_t k = 0; k < length; ++k) {
      tr.alpha[k] /= total;
      tr.beta[k] = rho * tr.alpha[k] + uniform;
    }
  } else {
    for (int dir = 0; dir < 2; ++dir) {
      tr.gates[dir].clear();
      tr.cell[dir].clear();
      tr.cell_tanh[dir].clear();
      tr.hidden[dir].clear();
    }
  }

  tr.output.assign(d, 0.0);
  for (std::size_t k = 0; k < length; ++k) {
    const double bk = tr.beta[k];
    const double* v = tr.inputs.data() + k * d;
    for (std::size_t i = 0; i < d; ++i) tr.output[i] += bk * v[i];
  }
}

void encoder_backward(const AttentionalEncoder& enc, const EncoderTrace& tr,
                      std::span<const double> d_output, std::span<double> d_params,
                      std::span<double> d_inputs) {
  const std::size_t l = tr.length, d = enc.input_dim(), h = enc.hidden();
  if (d_params.size() != enc.param_count()) throw Error("gradient buffer size mismatch");

  std::vector<double> d_beta(l, 0.0);
  for (std::size_t k = 0; k < l; ++k) {
    const double* v = tr.inputs.data() + k * d;
    double* dv = d_inputs.empty() ? nullptr : d_inputs.data() + k * d;
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      s += d_output[i] * v[i];
      if (dv) dv[i] += tr.beta[k] * d_output[i];
    }
    d_beta[k] = s;
  }
  if (!tr.recurrent) return;

  // beta = rho * alpha + const; alpha = softmax(scores).
  const double rho = enc.rho();
  double weighted = 0.0;
  for (std::size_t k = 0; k < l; ++k) weighted += tr.alpha[k] * rho * d_beta[k];
  std::vector<double> d_score(l);
  for (std::size_t k = 0; k < l; ++k) d_score[k] = tr.alpha[k] * (rho * d_beta[k] - weighted);

  const double* w = enc.params().data() + enc.attention_offset();
  double* dw = d_params.data() + enc.attention_offset();
  std::vector<double> d_hidden[2] = {std::vector<double>(l * h), std::vector<double>(l * h)};
  for (std::size_t k = 0; k < l; ++k) {
    for (std::size_t u = 0; u < h; ++u) {
      dw[u] += d_score[k] * tr.hidden[0][k * h + u];
      dw[h + u] += d_score[k] * tr.hidden[1][k * h + u];
      d_hidden[0][k * h + u] = d_score[k] * w[u];
      d_hidden[1][k * h + u] = d_score[k] * w[h + u];
    }
  }
  backprop_direction(enc, 0, tr, d_hidden[0], d_params, d_inputs);
  backprop_direction(enc, 1, tr, d_hidden[1], d_params, d_inputs);
}

std::vector<double> seq_encode(const AttentionalEncoder& enc, const std::vector<TokenVector>& tokens) {
  const std::size_t d = enc.input_dim(), h = enc.hidden();
  if (tokens.empty()) throw Error("seq_encode needs at least one token");
  EncoderTrace tr;
  tr.length = tokens.size();
  for (const auto& v : tokens) {
    if (v.size() != d) throw Error("token vector dimension mismatch");
    tr.inputs.insert(tr.inputs.end(), v.begin(), v.end());
  }
  run_direction(enc, 0, tr);
  run_direction(enc, 1, tr);
  std::vector<double> out(tr.length * 2 * h);
  for (std::size_t k = 0; k < tr.length; ++k) {
    std::copy_n(tr.hidden[0].begin() + k * h, h, out.begin() + k * 2 * h);
    std::copy_n(tr.hidden[1].begin() + k * h, h, out.begin() + k * 2 * h + h);
  }
  return out;
}

std::vector<double> attention_weights(const AttentionalEncoder& enc,
                                      std::span<const double> hidden_states, std::size_t length) {
  const std::size_t width = 2 * enc.hidden();
  if (length == 0 || hidden_states.size() != length * width) {
    throw Error("attention_weights: hidden state size mismatch");
  }
  const double* w = enc.params().data() + enc.attention_offset();
  std::vector<double> scores(length);
  double max_score = -INFINITY;
  for (std::size_t k = 0; k < length; ++k) {
    double s = 0.0;
    for (std::size_t u = 0; u < width; ++u) s += w[u] * hidden_states[k * width + u];
    scores[k] = s;
    max_score = std::max(max_score, s);
  }
  double total = 0.0;
  for (double& s : scores) {
    s = std::exp(s - max_score);
    total += s;
  }
  const double rho = enc.rho();
  std::vector<double> beta(length);
  for (std::size_t k = 0; k < length; ++k) {
    beta[k] = rho * scores[k] / total + (1.0 - rho) / static_cast<double>(length);
  }
  return beta;
}

AttributeEmbedding encode_attribute(const AttentionalEncoder& enc, const EmbeddingTable& table,
                                    const AttributeValue& value, std::vector<double>* beta) {
  if (value.missing()) {
    if (beta) beta->clear();
    return std::nullopt;
  }
  const std::size_t l = std::min(value.length(), enc.config().max_tokens);
  const std::size_t d = enc.input_dim();
  if (table.dim() != d) throw Error("embedding dim does not match encoder input dim");
  std::vector<double> inputs(l * d);
  for (std::size_t k = 0; k < l; ++k) {
    TokenVector v = table.embed(value.tokens[k]);
    std::copy(v.begin(), v.end(), inputs.begin() + k * d);
  }
  EncoderTrace tr;
  encoder_forward(enc, inputs, l, tr);
  if (beta) *beta = tr.beta;
  return tr.output;
}

AttributeEmbedding encode_attribute(const AttentionalEncoder& enc, const EmbeddingTable& table,
                                    const AttributeValue& value) {
  return encode_attribute(enc, table, value, nullptr);
}

}  // namespace autoblock
