#include "autoblock/text_embedding.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "autoblock/error.hpp"
#include "autoblock/random.hpp"

namespace autoblock {

std::vector<std::string> ngrams(std::string_view token, int min_n, int max_n) {
  if (min_n > max_n || min_n < 1) throw Error("invalid n-gram range");
  const std::string word = "<" + std::string(token) + ">";

  // Byte offsets of code point starts, plus the end.
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if ((static_cast<unsigned char>(word[i]) & 0xC0) != 0x80) starts.push_back(i);
  }
  const std::size_t chars = starts.size();
  starts.push_back(word.size());

  std::vector<std::string> out;
  for (std::size_t i = 0; i < chars; ++i) {
    for (int n = min_n; n <= max_n; ++n) {
      if (i + n > chars) break;
      out.push_back(word.substr(starts[i], starts[i + n] - starts[i]));
    }
  }
  bool whole_present = false;
  for (const auto& g : out) {
    if (g == word) whole_present = true;
  }
  if (!whole_present) out.push_back(word);
  return out;
}

EmbeddingTable::EmbeddingTable(const EmbeddingConfig& config, std::uint64_t init_seed)
    : config_(config) {
  validate();
  rows_.resize(config_.bucket_count * config_.dim);
  Rng rng(init_seed);
  const double bound = 1.0 / static_cast<double>(config_.dim);
  for (double& x : rows_) x = rng.uniform(-bound, bound);
}

EmbeddingTable EmbeddingTable::zeros(const EmbeddingConfig& config) {
  EmbeddingTable table;
  table.config_ = config;
  table.validate();
  table.rows_.assign(config.bucket_count * config.dim, 0.0);
  return table;
}

void EmbeddingTable::validate() const {
  if (config_.dim == 0) throw Error("embedding dim must be positive");
  if (config_.bucket_count == 0 || (config_.bucket_count & (config_.bucket_count - 1)) != 0) {
    throw Error("bucket_count must be a power of two");
  }
  if (config_.min_n < 1 || config_.min_n > config_.max_n) throw Error("invalid n-gram range");
}

std::vector<std::uint32_t> EmbeddingTable::buckets(std::string_view token) const {
  std::vector<std::uint32_t> out;
  if (is_pretrained(token)) return out;
  const std::uint64_t mask = config_.bucket_count - 1;
  for (const auto& g : ngrams(token, config_.min_n, config_.max_n)) {
    out.push_back(static_cast<std::uint32_t>(murmur64(g, config_.hash_seed) & mask));
  }
  return out;
}

bool EmbeddingTable::is_pretrained(std::string_view token) const {
  return pretrained(token) != nullptr;
}

const double* EmbeddingTable::pretrained(std::string_view token) const {
  if (pretrained_index_.empty()) return nullptr;
  auto it = pretrained_index_.find(std::string(token));
  if (it == pretrained_index_.end()) return nullptr;
  return pretrained_values_.data() + it->second * config_.dim;
}

TokenVector EmbeddingTable::embed(std::string_view token) const {
  TokenVector v(config_.dim, 0.0);
  if (const double* p = pretrained(token)) {
    v.assign(p, p + config_.dim);
    return v;
  }
  for (std::uint32_t b : buckets(token)) {
    auto r = row(b);
    for (std::size_t k = 0; k < config_.dim; ++k) v[k] += r[k];
  }
  return v;
}

void EmbeddingTable::add_pretrained(std::string token, std::span<const double> values) {
  if (values.size() != config_.dim) throw Error("pretrained vector dimension mismatch");
  for (double x : values) {
    if (!std::isfinite(x)) throw Error("non-finite pretrained value for '" + token + "'");
  }
  auto [it, inserted] = pretrained_index_.emplace(token, pretrained_tokens_.size());
  if (!inserted) {
    std::copy(values.begin(), values.end(), pretrained_values_.begin() + it->second * config_.dim);
    return;
  }
  pretrained_tokens_.push_back(std::move(token));
  pretrained_values_.insert(pretrained_values_.end(), values.begin(), values.end());
}

TokenVector embed_token(const EmbeddingTable& table, std::string_view token) {
  return table.embed(token);
}

EmbeddingTable load_pretrained(const std::string& path, EmbeddingConfig fallback,
                               std::uint64_t init_seed) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open pretrained vectors '" + path + "'");

  std::vector<std::pair<std::string, std::vector<double>>> entries;
  std::size_t dim = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;
    std::vector<double> values;
    std::string number;
    while (fields >> number) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(number, &used));
        if (used != number.size()) throw std::invalid_argument(number);
      } catch (const std::exception&) {
        throw Error("bad number '" + number + "' at line " + std::to_string(line_no) + " of '" +
                    path + "'");
      }
    }
    if (line_no == 1 && values.size() == 1 && token.find_first_not_of("0123456789") == std::string::npos) {
      continue;  // `count dim` header
    }
    if (values.empty()) {
      throw Error("no values at line " + std::to_string(line_no) + " of '" + path + "'");
    }
    if (dim == 0) dim = values.size();
    if (values.size() != dim) {
      throw Error("inconsistent dimension at line " + std::to_string(line_no) + " of '" + path +
                  "': expected " + std::to_string(dim) + ", found " +
                  std::to_string(values.size()));
    }
    entries.emplace_back(std::move(token), std::move(values));
  }
  if (entries.empty()) throw Error("no vectors in '" + path + "'");

  fallback.dim = dim;
  EmbeddingTable table(fallback, init_seed);
  for (auto& [token, values] : entries) table.add_pretrained(std::move(token), values);
  return table;
}

}  // namespace autoblock
