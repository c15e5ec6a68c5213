#pragma once

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "autoblock/data_model.hpp"
#include "autoblock/random.hpp"

namespace autoblock::testing {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("autoblock-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Single-table dataset from raw strings; each row is id then values.
inline Dataset make_dataset(const std::vector<std::string>& schema,
                            const std::vector<std::vector<std::string>>& rows) {
  Dataset d(schema);
  Table t{"A", {}};
  for (const auto& row : rows) {
    Tuple tuple;
    tuple.record_id = row.at(0);
    for (std::size_t j = 1; j < row.size(); ++j) tuple.attributes.push_back(tokenize(row[j]));
    t.tuples.push_back(tuple);
  }
  d.add_table(t);
  return d;
}

inline std::vector<double> random_unit(Rng& rng, std::size_t d) {
  std::vector<double> v(d);
  double n = 0.0;
  for (double& x : v) {
    x = rng.normal();
    n += x * x;
  }
  n = std::sqrt(n);
  for (double& x : v) x /= n;
  return v;
}

/// Unit vector at exactly cosine c to unit vector `base`.
inline std::vector<double> at_cosine(Rng& rng, const std::vector<double>& base, double c) {
  std::vector<double> o = random_unit(rng, base.size());
  double dot = 0.0;
  for (std::size_t i = 0; i < o.size(); ++i) dot += o[i] * base[i];
  double n = 0.0;
  for (std::size_t i = 0; i < o.size(); ++i) {
    o[i] -= dot * base[i];
    n += o[i] * o[i];
  }
  n = std::sqrt(n);
  std::vector<double> v(base.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = c * base[i] + std::sqrt(1.0 - c * c) * o[i] / n;
  return v;
}

}  // namespace autoblock::testing
