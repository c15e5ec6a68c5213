#include "autoblock/lsh.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "autoblock/binary_io.hpp"
#include "autoblock/error.hpp"
#include "autoblock/hashing.hpp"

namespace autoblock {

namespace {

constexpr char kMagic[8] = {'A', 'B', 'L', 'S', 'H', 'I', 'D', 'X'};
constexpr std::uint32_t kVersion = 1;
constexpr double kUnitTolerance = 1e-6;

// Signed axis code: axis * 2 + (negative ? 1 : 0).
struct Scored {
  double loss;
  std::size_t hash;
  std::uint32_t code;
};

std::uint32_t best_code(const std::vector<double>& y, std::size_t coordinates) {
  std::size_t best = 0;
  double best_abs = -1.0;
  for (std::size_t i = 0; i < coordinates; ++i) {
    const double a = std::fabs(y[i]);
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  return static_cast<std::uint32_t>(best * 2 + (y[best] < 0.0 ? 1 : 0));
}

double code_score(const std::vector<double>& y, std::uint32_t code) {
  const double v = y[code / 2];
  return (code & 1) ? -v : v;
}

}  // namespace

void LshParams::validate() const {
  if (tables == 0) throw ConfigError("lsh.tables: must be positive");
  if (hashes_per_table == 0 || hashes_per_table > 4)
    throw ConfigError("lsh.hashes_per_table: must lie in [1, 4]");
}

std::size_t padded_dimension(std::size_t d) {
  std::size_t p = 1;
  while (p < d) p <<= 1;
  return p;
}

std::size_t last_cp_dimension(std::size_t n, std::size_t padded_dim, std::size_t hashes_per_table) {
  long bits = 1;
  while ((std::size_t{1} << (bits + 2)) <= n) ++bits;
  long per_cp = 1;  // sign bit
  for (std::size_t p = padded_dim; p > 1; p >>= 1) ++per_cp;
  const long remaining = bits - static_cast<long>(hashes_per_table - 1) * per_cp;
  if (remaining >= per_cp) return padded_dim;
  if (remaining <= 1) return 1;
  return std::size_t{1} << (remaining - 1);
}

std::vector<double> random_rotation(std::size_t d, Rng& rng) {
  Eigen::MatrixXd g(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (std::size_t j = 0; j < d; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  std::vector<double> out(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) out[i * d + j] = q(i, j);
  return out;
}

int hash_one(std::span<const double> rotation, std::size_t d, std::span<const double> v) {
  if (rotation.size() != d * d || v.size() > d) throw Error("hash_one: dimension mismatch");
  std::vector<double> y(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) acc += rotation[i * d + j] * v[j];
    y[i] = acc;
  }
  const std::uint32_t code = best_code(y, d);
  const int axis = static_cast<int>(code / 2) + 1;
  return (code & 1) ? -axis : axis;
}

CrossPolytopeHash::CrossPolytopeHash(std::size_t dim, std::size_t tables, std::size_t hashes_per_table,
                                     std::size_t last_dim, std::uint64_t seed)
    : dim_(dim), padded_(padded_dimension(dim)), tables_(tables), hashes_(hashes_per_table), last_(last_dim) {
  if (dim == 0) throw Error("cross-polytope hash: dimension must be positive");
  if (last_ == 0 || last_ > padded_) last_ = padded_;
  Rng rng(mix64(seed ^ 0x63726f7373ULL));
  rotations_.reserve(tables * hashes_per_table * padded_ * padded_);
  for (std::size_t k = 0; k < tables * hashes_per_table; ++k) {
    for (double x : random_rotation(padded_, rng)) rotations_.push_back(binary::round_f32(x));
  }
}

std::span<const double> CrossPolytopeHash::rotation(std::size_t t, std::size_t b) const {
  const std::size_t size = padded_ * padded_;
  return {rotations_.data() + (t * hashes_ + b) * size, size};
}

CrossPolytopeHash CrossPolytopeHash::from_values(std::size_t dim, std::size_t tables,
                                                 std::size_t hashes_per_table, std::size_t last_dim,
                                                 std::vector<double> values) {
  CrossPolytopeHash h;
  h.dim_ = dim;
  h.padded_ = padded_dimension(dim);
  h.tables_ = tables;
  h.hashes_ = hashes_per_table;
  h.last_ = last_dim;
  if (last_dim == 0 || last_dim > h.padded_) throw Error("last cross-polytope dimension out of range");
  if (values.size() != tables * hashes_per_table * h.padded_ * h.padded_) throw Error("rotation count mismatch");
  h.rotations_ = std::move(values);
  return h;
}

void CrossPolytopeHash::rotate(std::size_t t, std::size_t b, std::span<const double> v,
                               std::vector<double>& out) const {
  auto r = rotation(t, b);
  out.assign(padded_, 0.0);
  for (std::size_t i = 0; i < padded_; ++i) {
    const double* row = r.data() + i * padded_;
    double acc = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) acc += row[j] * v[j];
    out[i] = acc;
  }
}

std::uint64_t CrossPolytopeHash::key(std::size_t t, std::span<const double> v) const {
  std::vector<double> y;
  std::uint64_t key = 0, radix = 1;
  for (std::size_t b = 0; b < hashes_; ++b) {
    rotate(t, b, v, y);
    key += best_code(y, coordinates(b)) * radix;
    radix *= 2 * padded_;
  }
  return key;
}

std::vector<std::uint64_t> CrossPolytopeHash::probe_keys(std::size_t t, std::span<const double> v,
                                                         std::size_t extra) const {
  std::vector<double> y;
  std::vector<std::uint32_t> home(hashes_);
  std::vector<std::uint64_t> radix(hashes_);
  std::vector<Scored> alternatives;
  std::uint64_t key = 0, r = 1;
  for (std::size_t b = 0; b < hashes_; ++b) {
    rotate(t, b, v, y);
    home[b] = best_code(y, coordinates(b));
    radix[b] = r;
    key += home[b] * r;
    r *= 2 * padded_;
    if (extra == 0) continue;
    const double best = code_score(y, home[b]);
    std::vector<Scored> local;
    for (std::uint32_t code = 0; code < 2 * coordinates(b); ++code) {
      if (code == home[b]) continue;
      local.push_back({best - code_score(y, code), b, code});
    }
    const std::size_t keep = std::min(extra, local.size());
    auto by_loss = [](const Scored& a, const Scored& c) {
      return a.loss != c.loss ? a.loss < c.loss : a.code < c.code;
    };
    std::partial_sort(local.begin(), local.begin() + static_cast<std::ptrdiff_t>(keep), local.end(), by_loss);
    alternatives.insert(alternatives.end(), local.begin(), local.begin() + static_cast<std::ptrdiff_t>(keep));
  }
  std::stable_sort(alternatives.begin(), alternatives.end(),
                   [](const Scored& a, const Scored& c) { return a.loss < c.loss; });
  std::vector<std::uint64_t> keys{key};
  for (std::size_t k = 0; k < std::min(extra, alternatives.size()); ++k) {
    const Scored& alt = alternatives[k];
    keys.push_back(key - home[alt.hash] * radix[alt.hash] + alt.code * radix[alt.hash]);
  }
  return keys;
}

std::size_t default_max_results(std::size_t n) {
  return std::max<std::size_t>(1000, static_cast<std::size_t>(std::sqrt(static_cast<double>(n))));
}

void LshIndex::check_unit(std::span<const double> v, const std::string& what) const {
  if (v.size() != dim()) {
    throw Error(what + ": dimension " + std::to_string(v.size()) + ", index has " + std::to_string(dim()));
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (std::fabs(std::sqrt(norm) - 1.0) > kUnitTolerance) throw Error(what + ": vector is not unit length");
}

LshIndex LshIndex::build(std::vector<LshItem> items, std::size_t dim, const LshParams& params) {
  params.validate();
  LshIndex index;
  index.params_ = params;
  if (index.params_.last_cp_dimension == 0) {
    index.params_.last_cp_dimension = last_cp_dimension(items.size(), padded_dimension(dim), params.hashes_per_table);
  }
  index.hash_ = CrossPolytopeHash(dim, params.tables, params.hashes_per_table, index.params_.last_cp_dimension,
                                  params.seed);
  index.tables_.resize(params.tables);
  std::set<std::pair<std::string, std::uint32_t>> seen;
  index.ids_.reserve(items.size());
  index.vectors_.reserve(items.size() * dim);
  for (auto& item : items) {
    index.check_unit(item.vector, "item '" + item.id + "'");
    if (!seen.emplace(item.id, item.signature).second) {
      throw Error("item '" + item.id + "' signature " + std::to_string(item.signature) + " indexed twice");
    }
    for (double x : item.vector) index.vectors_.push_back(binary::round_f32(x));
    index.ids_.push_back(std::move(item.id));
    index.signatures_.push_back(item.signature);
  }
  for (std::size_t t = 0; t < params.tables; ++t) {
    auto& table = index.tables_[t];
    for (std::uint32_t i = 0; i < index.size(); ++i) table[index.hash_.key(t, index.vector(i))].push_back(i);
  }
  return index;
}

std::vector<Neighbor> LshIndex::rank(std::span<const double> q, std::vector<std::uint32_t>& candidates,
                                     double theta, std::size_t max_results) const {
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  double qn = 0.0;
  for (double x : q) qn += x * x;
  qn = std::sqrt(qn);
  std::vector<Neighbor> out;
  for (std::uint32_t c : candidates) {
    auto v = vector(c);
    double dot = 0.0, vn = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      dot += q[i] * v[i];
      vn += v[i] * v[i];
    }
    const double cosine = std::clamp(dot / (qn * std::sqrt(vn)), -1.0, 1.0);
    if (cosine >= theta) out.push_back({c, cosine});
  }
  auto better = [](const Neighbor& a, const Neighbor& b) {
    return a.cosine != b.cosine ? a.cosine > b.cosine : a.item < b.item;
  };
  if (out.size() > max_results) {
    std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(max_results), out.end(), better);
    out.resize(max_results);
  } else {
    std::sort(out.begin(), out.end(), better);
  }
  return out;
}

std::vector<Neighbor> LshIndex::query(std::span<const double> q, double theta, std::size_t max_results) const {
  check_unit(q, "query");
  std::vector<std::uint32_t> candidates;
  for (std::size_t t = 0; t < tables_.size(); ++t) {
    for (std::uint64_t key : hash_.probe_keys(t, q, params_.multiprobe)) {
      auto it = tables_[t].find(key);
      if (it != tables_[t].end()) candidates.insert(candidates.end(), it->second.begin(), it->second.end());
    }
  }
  return rank(q, candidates, theta, max_results);
}

std::vector<Neighbor> LshIndex::brute_force(std::span<const double> q, double theta,
                                            std::size_t max_results) const {
  check_unit(q, "query");
  std::vector<std::uint32_t> all(size());
  for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;
  return rank(q, all, theta, max_results);
}

std::size_t LshIndex::stored_entries() const {
  std::size_t total = 0;
  for (const auto& table : tables_)
    for (const auto& [key, bucket] : table) total += bucket.size();
  return total;
}

void LshIndex::save(std::ostream& out) const {
  binary::Writer w(out);
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(hash_.dim()));
  w.u32(static_cast<std::uint32_t>(hash_.padded_dim()));
  w.u32(static_cast<std::uint32_t>(params_.tables));
  w.u32(static_cast<std::uint32_t>(params_.hashes_per_table));
  w.u32(static_cast<std::uint32_t>(params_.multiprobe));
  w.u32(static_cast<std::uint32_t>(params_.last_cp_dimension));
  w.u64(params_.seed);
  for (double x : hash_.values()) w.f32(x);
  w.u64(size());
  for (std::uint32_t i = 0; i < size(); ++i) {
    w.str(ids_[i]);
    w.u32(signatures_[i]);
    for (double x : vector(i)) w.f32(x);
  }
  for (const auto& table : tables_) {
    std::vector<std::uint64_t> keys;
    for (const auto& [key, bucket] : table) keys.push_back(key);
    std::sort(keys.begin(), keys.end());
    w.u64(keys.size());
    for (std::uint64_t key : keys) {
      const auto& bucket = table.at(key);
      w.u64(key);
      w.u64(bucket.size());
      for (std::uint32_t item : bucket) w.u32(item);
    }
  }
  if (!out) throw Error("failed writing index");
}

LshIndex LshIndex::load(std::istream& in) {
  binary::Reader r(in, "index");
  char magic[8];
  r.bytes(magic, sizeof(magic));
  if (!std::equal(magic, magic + 8, kMagic)) throw Error("index: bad magic bytes");
  const std::uint32_t version = r.u32();
  if (version != kVersion) {
    throw Error("index: format version " + std::to_string(version) + " unsupported (expected " +
                std::to_string(kVersion) + ")");
  }
  LshIndex index;
  const std::size_t dim = r.u32();
  const std::size_t padded = r.u32();
  index.params_.tables = r.u32();
  index.params_.hashes_per_table = r.u32();
  index.params_.multiprobe = r.u32();
  index.params_.last_cp_dimension = r.u32();
  index.params_.seed = r.u64();
  index.params_.validate();
  if (dim == 0 || dim > (1u << 16) || padded != padded_dimension(dim)) throw Error("index: bad dimensions");
  std::vector<double> rotations(index.params_.tables * index.params_.hashes_per_table * padded * padded);
  for (double& x : rotations) x = r.f32();
  index.hash_ = CrossPolytopeHash::from_values(dim, index.params_.tables, index.params_.hashes_per_table,
                                               index.params_.last_cp_dimension, std::move(rotations));
  const std::size_t n = r.count(std::uint64_t{1} << 32, "item count");
  for (std::size_t i = 0; i < n; ++i) {
    index.ids_.push_back(r.str());
    index.signatures_.push_back(r.u32());
    for (std::size_t k = 0; k < dim; ++k) index.vectors_.push_back(r.f32());
  }
  index.tables_.resize(index.params_.tables);
  for (auto& table : index.tables_) {
    const std::size_t buckets = r.count(n, "bucket count");
    for (std::size_t k = 0; k < buckets; ++k) {
      const std::uint64_t key = r.u64();
      const std::size_t size = r.count(n, "bucket size");
      auto& bucket = table[key];
      for (std::size_t e = 0; e < size; ++e) {
        const std::uint32_t item = r.u32();
        if (item >= n) throw Error("index: bucket entry out of range");
        bucket.push_back(item);
      }
    }
  }
  r.expect_end();
  return index;
}

void LshIndex::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  save(out);
}

LshIndex LshIndex::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  return load(in);
}

double rho_exponent(double theta, double theta_prime) {
  if (!(theta_prime > -1.0 && theta_prime < theta && theta < 1.0)) {
    throw Error("rho_exponent: need -1 < theta' < theta < 1");
  }
  return (1.0 - theta) / (1.0 - theta_prime) * (1.0 + theta_prime) / (1.0 + theta);
}

double cosine_to_euclidean(double theta) {
  if (!(theta >= -1.0 && theta <= 1.0)) throw Error("cosine_to_euclidean: theta outside [-1, 1]");
  return std::sqrt(2.0 - 2.0 * theta);
}

double approx_factor(double theta, double theta_prime) {
  if (!(theta_prime > -1.0 && theta_prime < theta && theta < 1.0)) {
    throw Error("approx_factor: need -1 < theta' < theta < 1");
  }
  return std::sqrt((1.0 - theta_prime) / (1.0 - theta));
}

}  // namespace autoblock
