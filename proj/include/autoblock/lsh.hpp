#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "autoblock/random.hpp"

namespace autoblock {

struct LshParams {
  std::size_t tables = 10;           // K
  std::size_t hashes_per_table = 2;  // B
  std::size_t multiprobe = 1;        // extra buckets probed per table
  /// Coordinates seen by the last hash of each table; 0 derives it from
  /// the point count at build time (see last_cp_dimension()).
  std::size_t last_cp_dimension = 0;
  std::uint64_t seed = 1;

  void validate() const;

  friend bool operator==(const LshParams&, const LshParams&) = default;
};

/// Smallest power of two >= d.
std::size_t padded_dimension(std::size_t d);

/// Size of the last cross-polytope of a table so that a table has between
/// n/4 and n/2 buckets (FALCONN's default rule): with b the smallest value
/// >= 1 such that 2^(b+2) > n, and log2(2 d') bits per full cross-polytope, the last one
/// keeps 2^(r-1) coordinates for the r bits left over (clamped to [1, d']).
std::size_t last_cp_dimension(std::size_t n, std::size_t padded_dim, std::size_t hashes_per_table);

/// Haar-random orthogonal matrix, row-major d x d: QR of a Gaussian matrix
/// with the signs of R's diagonal folded into Q.
std::vector<double> random_rotation(std::size_t d, Rng& rng);

/// Nearest signed standard basis vector of R v, as +-(axis + 1). `v` may be
/// shorter than the rotation (zero padded). Ties go to the smallest axis,
/// then to the positive sign.
int hash_one(std::span<const double> rotation, std::size_t d, std::span<const double> v);

/// B rotations per table for K tables.
class CrossPolytopeHash {
 public:
  CrossPolytopeHash() = default;
  CrossPolytopeHash(std::size_t dim, std::size_t tables, std::size_t hashes_per_table,
                    std::size_t last_dim, std::uint64_t seed);

  std::size_t dim() const { return dim_; }
  std::size_t padded_dim() const { return padded_; }
  std::size_t tables() const { return tables_; }
  std::size_t hashes_per_table() const { return hashes_; }
  /// Leading rotated coordinates used by hash B-1 of every table.
  std::size_t last_dim() const { return last_; }
  /// Rotation b of table t, row-major padded_dim x padded_dim. Entries are
  /// float32 values so that a persisted index hashes identically.
  std::span<const double> rotation(std::size_t t, std::size_t b) const;

  /// Bucket key of `v` in table t (mixed radix over the B signed axes).
  std::uint64_t key(std::size_t t, std::span<const double> v) const;
  /// Home key followed by up to `extra` keys in order of increasing score
  /// loss, each changing one of the B hashes to a runner-up signed axis.
  std::vector<std::uint64_t> probe_keys(std::size_t t, std::span<const double> v,
                                        std::size_t extra) const;

  const std::vector<double>& values() const { return rotations_; }
  /// Rebuilds a hash from stored rotations (same layout as values()).
  static CrossPolytopeHash from_values(std::size_t dim, std::size_t tables, std::size_t hashes_per_table,
                                       std::size_t last_dim, std::vector<double> values);

  friend bool operator==(const CrossPolytopeHash&, const CrossPolytopeHash&) = default;

 private:
  void rotate(std::size_t t, std::size_t b, std::span<const double> v, std::vector<double>& out) const;

  std::size_t coordinates(std::size_t b) const { return b + 1 == hashes_ ? last_ : padded_; }

  std::size_t dim_ = 0, padded_ = 0, tables_ = 0, hashes_ = 0, last_ = 0;
  std::vector<double> rotations_;
};

struct LshItem {
  std::string id;
  std::uint32_t signature = 0;
  std::vector<double> vector;  // unit norm
};

struct Neighbor {
  std::uint32_t item = 0;
  double cosine = 0.0;
};

/// Default per-query cap: max(1000, floor(sqrt(n))).
std::size_t default_max_results(std::size_t n);

class LshIndex {
 public:
  LshIndex() = default;

  /// Throws on a non-unit vector (naming its id) or a repeated
  /// (id, signature) entry.
  static LshIndex build(std::vector<LshItem> items, std::size_t dim, const LshParams& params);

  /// Items with cosine >= theta among the probed buckets, best first (ties
  /// by insertion order), at most max_results of them.
  std::vector<Neighbor> query(std::span<const double> q, double theta, std::size_t max_results) const;

  /// Exact scan over every stored vector, same ordering and truncation.
  std::vector<Neighbor> brute_force(std::span<const double> q, double theta,
                                    std::size_t max_results) const;

  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return hash_.dim(); }
  const LshParams& params() const { return params_; }
  const CrossPolytopeHash& hash() const { return hash_; }
  const std::string& id(std::uint32_t item) const { return ids_[item]; }
  std::uint32_t signature(std::uint32_t item) const { return signatures_[item]; }
  std::span<const double> vector(std::uint32_t item) const {
    return {vectors_.data() + std::size_t{item} * dim(), dim()};
  }
  /// Sum of bucket sizes over all tables.
  std::size_t stored_entries() const;
  std::size_t bucket_count(std::size_t table) const { return tables_[table].size(); }

  /// Little-endian binary layout; see docs/file_formats.md.
  void save(std::ostream& out) const;
  static LshIndex load(std::istream& in);
  void save(const std::string& path) const;
  static LshIndex load(const std::string& path);

  friend bool operator==(const LshIndex&, const LshIndex&) = default;

 private:
  void check_unit(std::span<const double> v, const std::string& what) const;
  std::vector<Neighbor> rank(std::span<const double> q, std::vector<std::uint32_t>& candidates,
                             double theta, std::size_t max_results) const;

  LshParams params_;
  CrossPolytopeHash hash_;
  std::vector<std::string> ids_;
  std::vector<std::uint32_t> signatures_;
  std::vector<double> vectors_;  // float32-rounded
  std::vector<std::unordered_map<std::uint64_t, std::vector<std::uint32_t>>> tables_;
};

/// (1 - theta) / (1 - theta') * (1 + theta') / (1 + theta), the query-time
/// exponent of cross-polytope LSH with the vanishing term dropped. Requires
/// -1 < theta' < theta < 1.
double rho_exponent(double theta, double theta_prime);
/// Euclidean distance between unit vectors at cosine theta: sqrt(2 - 2 theta).
double cosine_to_euclidean(double theta);
/// sqrt((1 - theta') / (1 - theta)).
double approx_factor(double theta, double theta_prime);

}  // namespace autoblock
