#include "autoblock/baselines.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <unordered_map>

#include "autoblock/error.hpp"
#include "autoblock/hashing.hpp"

namespace autoblock {

namespace {

constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

std::uint64_t mod61(unsigned __int128 x) {
  std::uint64_t lo = static_cast<std::uint64_t>(x & kMersenne61);
  std::uint64_t hi = static_cast<std::uint64_t>(x >> 61);
  std::uint64_t r = lo + hi;
  while (r >= kMersenne61) r -= kMersenne61;
  return r;
}

std::size_t require_attribute(const std::vector<std::string>& schema, const std::string& name) {
  auto it = std::find(schema.begin(), schema.end(), name);
  if (it == schema.end()) throw ConfigError("key attribute '" + name + "' not in schema");
  return static_cast<std::size_t>(it - schema.begin());
}

std::vector<std::string> split_on(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

// Pairs of tuples sharing a bucket value, restricted to cross-table pairs in
// bipartite mode.
void emit_groups(const Dataset& dataset, const std::vector<std::vector<std::size_t>>& groups,
                 CandidateSet& out) {
  for (const auto& group : groups) {
    for (std::size_t x = 0; x < group.size(); ++x) {
      for (std::size_t y = x + 1; y < group.size(); ++y) {
        if (dataset.bipartite() && dataset.table_of(group[x]) == dataset.table_of(group[y])) continue;
        out.insert(dataset.tuple(group[x]).record_id, dataset.tuple(group[y]).record_id);
      }
    }
  }
}

}  // namespace

KeySpec KeySpec::parse(const std::string& text, const std::vector<std::string>& schema) {
  KeySpec spec;
  if (text.empty()) throw ConfigError("empty key specification");
  if (text == "all") {
    spec.kind = schema.size() > 1 ? Kind::disjunction : Kind::single;
    spec.attributes = schema;
    return spec;
  }
  const bool has_or = text.find('|') != std::string::npos;
  const bool has_and = text.find('+') != std::string::npos;
  if (has_or && has_and) throw ConfigError("key '" + text + "' mixes '|' and '+'");
  spec.kind = has_or ? Kind::disjunction : has_and ? Kind::conjunction : Kind::single;
  spec.attributes = split_on(text, has_or ? '|' : '+');
  for (const auto& name : spec.attributes) require_attribute(schema, name);
  return spec;
}

CandidateSet key_block(const Dataset& dataset, const KeySpec& key) {
  if (key.attributes.empty()) throw ConfigError("key has no attributes");
  std::vector<std::size_t> columns;
  for (const auto& name : key.attributes) columns.push_back(require_attribute(dataset.schema(), name));

  auto run = [&](const std::vector<std::size_t>& cols, CandidateSet& out) {
    std::map<std::vector<std::string>, std::vector<std::size_t>> buckets;
    for (std::size_t t = 0; t < dataset.size(); ++t) {
      const Tuple& tuple = dataset.tuple(t);
      std::vector<std::string> value;
      bool missing = false;
      for (std::size_t j : cols) {
        if (tuple.attributes[j].missing()) {
          missing = true;
          break;
        }
        value.push_back(tuple.attributes[j].joined());
      }
      if (!missing) buckets[value].push_back(t);
    }
    std::vector<std::vector<std::size_t>> groups;
    for (auto& [value, members] : buckets) groups.push_back(std::move(members));
    emit_groups(dataset, groups, out);
  };

  CandidateSet out;
  if (key.kind == KeySpec::Kind::disjunction) {
    for (std::size_t j : columns) run({j}, out);
  } else {
    run(columns, out);
  }
  return out;
}

std::set<std::string> representative_set(const AttributeValue& value, std::size_t ngram_n) {
  std::set<std::string> out;
  const auto& tokens = value.tokens;
  const std::size_t top = std::max<std::size_t>(ngram_n, 1);
  for (std::size_t n = 1; n <= top; ++n) {
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      std::string gram = tokens[i];
      for (std::size_t k = 1; k < n; ++k) gram += " " + tokens[i + k];
      out.insert(std::move(gram));
    }
  }
  return out;
}

std::set<std::string> representative_set(const Tuple& tuple, std::size_t attribute, std::size_t ngram_n) {
  return representative_set(tuple.attributes.at(attribute), ngram_n);
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t common = 0;
  auto ia = a.begin(), ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

void MinHashParams::validate() const {
  if (bands == 0) throw ConfigError("minhash.bands: must be positive");
  if (rows == 0) throw ConfigError("minhash.rows: must be positive");
  if (ngram_n == 0) throw ConfigError("minhash.ngram_n: must be positive");
}

MinHasher::MinHasher(std::size_t functions, std::uint64_t seed) {
  std::uint64_t state = mix64(seed ^ 0x6d696e68617368ULL);
  for (std::size_t i = 0; i < functions; ++i) {
    std::uint64_t a = 0;
    while (a == 0) {
      state = mix64(state);
      a = state % kMersenne61;
    }
    state = mix64(state);
    a_.push_back(a);
    b_.push_back(state % kMersenne61);
  }
}

std::vector<std::uint64_t> MinHasher::sketch(const std::set<std::string>& elements) const {
  std::vector<std::uint64_t> out(size(), std::numeric_limits<std::uint64_t>::max());
  for (const auto& e : elements) {
    const std::uint64_t h = murmur64(e, kDefaultHashSeed) % kMersenne61;
    for (std::size_t i = 0; i < size(); ++i) {
      const std::uint64_t v = mod61(static_cast<unsigned __int128>(a_[i]) * h + b_[i]);
      out[i] = std::min(out[i], v);
    }
  }
  return out;
}

double estimate_jaccard(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  if (a.size() != b.size() || a.empty()) throw Error("estimate_jaccard: sketch size mismatch");
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += a[i] == b[i];
  return static_cast<double>(same) / static_cast<double>(a.size());
}

CandidateSet minhash_block(const Dataset& dataset, const std::vector<std::size_t>& attributes, double theta,
                           const MinHashParams& params) {
  params.validate();
  if (!(theta > 0.0 && theta < 1.0 + 1e-12)) throw ConfigError("minhash threshold must lie in (0, 1]");
  CandidateSet out;
  const MinHasher hasher(params.bands * params.rows, params.seed);
  for (std::size_t j : attributes) {
    if (j >= dataset.attribute_count()) throw Error("minhash attribute out of range");
    std::vector<std::set<std::string>> sets(dataset.size());
    std::vector<std::vector<std::uint64_t>> sketches(dataset.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(dataset.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t t = 0; t < n; ++t) {
      sets[t] = representative_set(dataset.tuple(static_cast<std::size_t>(t)), j, params.ngram_n);
      if (!sets[t].empty()) sketches[t] = hasher.sketch(sets[t]);
    }
    CandidateSet attribute_pairs;
    for (std::size_t band = 0; band < params.bands; ++band) {
      std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
      for (std::size_t t = 0; t < dataset.size(); ++t) {
        if (sets[t].empty()) continue;
        std::uint64_t key = mix64(band);
        for (std::size_t r = 0; r < params.rows; ++r) key = mix64(key ^ sketches[t][band * params.rows + r]);
        buckets[key].push_back(t);
      }
      std::vector<std::pair<std::size_t, std::size_t>> pairs;
      for (const auto& [key, members] : buckets) {
        for (std::size_t x = 0; x < members.size(); ++x) {
          for (std::size_t y = x + 1; y < members.size(); ++y) {
            const std::size_t a = members[x], b = members[y];
            if (dataset.bipartite() && dataset.table_of(a) == dataset.table_of(b)) continue;
            // Bands agreeing on every row but colliding only by key hash are
            // filtered here.
            if (!std::equal(sketches[a].begin() + static_cast<std::ptrdiff_t>(band * params.rows),
                            sketches[a].begin() + static_cast<std::ptrdiff_t>((band + 1) * params.rows),
                            sketches[b].begin() + static_cast<std::ptrdiff_t>(band * params.rows))) {
              continue;
            }
            pairs.emplace_back(a, b);
          }
        }
      }
      for (const auto& [a, b] : pairs) {
        const std::string& ia = dataset.tuple(a).record_id;
        const std::string& ib = dataset.tuple(b).record_id;
        if (attribute_pairs.contains(ia, ib)) continue;
        if (params.verify && jaccard(sets[a], sets[b]) < theta) continue;
        attribute_pairs.insert(ia, ib);
      }
    }
    out.merge(attribute_pairs);
  }
  return out;
}

}  // namespace autoblock
