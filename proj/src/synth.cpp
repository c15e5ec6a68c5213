#include "autoblock/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <set>

#include "autoblock/error.hpp"
#include "autoblock/hashing.hpp"

namespace autoblock {

namespace {

constexpr const char* kConsonants = "bcdfghjklmnprstvwz";
constexpr const char* kVowels = "aeiou";
constexpr const char* kLetters = "abcdefghijklmnopqrstuvwxyz";
constexpr const char* kSuffixes[] = {"[remix]", "(live)", "(remastered)", "[radio edit]", "(acoustic version)",
                                     "(demo)", "[extended mix]", "(mono)"};

class Zipf {
 public:
  Zipf(std::size_t n, double s) : cumulative_(n) {
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      total += 1.0 / std::pow(static_cast<double>(k + 1), s);
      cumulative_[k] = total;
    }
    for (double& c : cumulative_) c /= total;
  }
  std::size_t operator()(Rng& rng) const {
    const double u = rng.uniform();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
  }

 private:
  std::vector<double> cumulative_;
};

std::vector<std::string> make_words(std::size_t count, std::size_t min_syllables, std::size_t max_syllables,
                                    Rng& rng) {
  std::set<std::string> seen;
  std::vector<std::string> out;
  while (out.size() < count) {
    const std::size_t syllables = min_syllables + rng.below(max_syllables - min_syllables + 1);
    std::string w;
    for (std::size_t k = 0; k < syllables; ++k) {
      w += kConsonants[rng.below(18)];
      w += kVowels[rng.below(5)];
      if (rng.bernoulli(0.3)) w += kConsonants[rng.below(18)];
    }
    if (seen.insert(w).second) out.push_back(std::move(w));
  }
  return out;
}

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < s.size()) {
    const std::size_t end = s.find(' ', start);
    const std::size_t stop = end == std::string::npos ? s.size() : end;
    if (stop > start) out.push_back(s.substr(start, stop - start));
    start = stop + 1;
  }
  return out;
}

std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

struct Vocabulary {
  std::vector<std::string> words, first, last, albums;
  Zipf word_dist{1, 1.0}, person_dist{1, 1.0}, album_dist{1, 1.0};
  std::vector<std::string> persons;

  explicit Vocabulary(Rng& rng)
      : words(make_words(4000, 1, 3, rng)), first(make_words(400, 2, 2, rng)), last(make_words(1500, 2, 3, rng)) {
    word_dist = Zipf(words.size(), 1.0);
    for (std::size_t k = 0; k < 5000; ++k)
      persons.push_back(first[rng.below(first.size())] + " " + last[rng.below(last.size())]);
    person_dist = Zipf(persons.size(), 0.9);
    for (std::size_t k = 0; k < 3000; ++k) albums.push_back(phrase(1 + rng.below(3), rng));
    album_dist = Zipf(albums.size(), 0.8);
  }

  std::string phrase(std::size_t length, Rng& rng) const {
    std::vector<std::string> w;
    for (std::size_t k = 0; k < length; ++k) w.push_back(words[word_dist(rng)]);
    return join_words(w);
  }
  const std::string& person(Rng& rng) const { return persons[person_dist(rng)]; }
  const std::string& album(Rng& rng) const { return albums[album_dist(rng)]; }
};

enum Field { kTitle, kAlbum, kComposer, kSongwriter, kFieldCount };

}  // namespace

Regime parse_regime(const std::string& name) {
  if (name == "clean") return Regime::clean;
  if (name == "dirty") return Regime::dirty;
  if (name == "unstructured") return Regime::unstructured;
  throw ConfigError("unknown regime '" + name + "' (expected clean, dirty or unstructured)");
}

std::string regime_name(Regime regime) {
  switch (regime) {
    case Regime::clean: return "clean";
    case Regime::dirty: return "dirty";
    case Regime::unstructured: return "unstructured";
  }
  return "dirty";
}

SynthSpec SynthSpec::defaults(Regime regime) {
  SynthSpec s;
  s.regime = regime;
  switch (regime) {
    case Regime::clean:
      s.typo_rate = 0.05;
      s.token_drop_rate = 0.05;
      s.missing_attr_rate = 0.05;
      s.attr_swap_rate = 0.0;
      s.version_suffix_rate = 0.05;
      break;
    case Regime::dirty:
      s.typo_rate = 0.3;
      s.token_drop_rate = 0.1;
      s.missing_attr_rate = 0.3;
      s.attr_swap_rate = 0.2;
      s.version_suffix_rate = 0.2;
      break;
    case Regime::unstructured:
      s.typo_rate = 0.2;
      s.token_drop_rate = 0.1;
      s.missing_attr_rate = 0.2;
      s.attr_swap_rate = 0.2;
      s.version_suffix_rate = 0.2;
      break;
  }
  return s;
}

void SynthSpec::validate() const {
  auto rate = [](double r, const char* name) {
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError(std::string("synth.") + name + ": must lie in [0, 1]");
  };
  rate(typo_rate, "typo_rate");
  rate(token_drop_rate, "token_drop_rate");
  rate(missing_attr_rate, "missing_attr_rate");
  rate(attr_swap_rate, "attr_swap_rate");
  rate(version_suffix_rate, "version_suffix_rate");
  if (entity_count == 0) throw ConfigError("synth.entities: must be positive");
}

std::string typo(const std::string& word, Rng& rng) {
  if (word.empty()) return word;
  std::string w = word;
  auto substitute = [&] {
    const std::size_t pos = rng.below(w.size());
    char c;
    do {
      c = kLetters[rng.below(26)];
    } while (c == w[pos]);
    w[pos] = c;
  };
  switch (rng.below(4)) {
    case 0:
      substitute();
      break;
    case 1:
      if (w.size() < 2) {
        substitute();
      } else {
        w.erase(rng.below(w.size()), 1);
      }
      break;
    case 2:
      w.insert(w.begin() + static_cast<std::ptrdiff_t>(rng.below(w.size() + 1)), kLetters[rng.below(26)]);
      break;
    default: {
      std::vector<std::size_t> spots;
      for (std::size_t i = 0; i + 1 < w.size(); ++i)
        if (w[i] != w[i + 1]) spots.push_back(i);
      if (spots.empty()) {
        substitute();
      } else {
        const std::size_t i = spots[rng.below(spots.size())];
        std::swap(w[i], w[i + 1]);
      }
    }
  }
  return w;
}

SynthCorpus synthesize(const SynthSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng vocab_rng(mix64(seed ^ 0x766f636162ULL));
  const Vocabulary vocab(vocab_rng);
  Rng rng(mix64(seed ^ 0x7265636f7264ULL));

  const bool unstructured = spec.regime == Regime::unstructured;
  std::vector<std::string> schema = unstructured ? std::vector<std::string>{"record"}
                                                 : std::vector<std::string>{"title", "album", "composer", "songwriter"};
  Table table;
  table.name = "synthetic";
  SynthCorpus corpus;
  char id[48];
  for (std::size_t e = 0; e < spec.entity_count; ++e) {
    std::array<std::string, kFieldCount> original;
    original[kTitle] = vocab.phrase(2 + rng.below(4), rng);
    original[kAlbum] = vocab.album(rng);
    original[kComposer] = vocab.person(rng);
    if (rng.bernoulli(0.3)) {
      original[kSongwriter] = "";
    } else {
      original[kSongwriter] = rng.bernoulli(0.5) ? original[kComposer] : vocab.person(rng);
    }

    std::vector<std::string> ids;
    for (std::size_t k = 0; k <= spec.duplicates_per_entity; ++k) {
      auto values = original;
      if (k > 0) {
        for (auto& v : values) {
          if (v.empty()) continue;
          if (rng.bernoulli(spec.missing_attr_rate)) {
            v.clear();
            continue;
          }
          auto words = split_words(v);
          if (rng.bernoulli(spec.typo_rate)) {
            auto& w = words[rng.below(words.size())];
            w = typo(w, rng);
          }
          if (words.size() >= 2 && rng.bernoulli(spec.token_drop_rate)) {
            words.erase(words.begin() + static_cast<std::ptrdiff_t>(rng.below(words.size())));
          }
          v = join_words(words);
        }
        if (rng.bernoulli(spec.attr_swap_rate)) std::swap(values[kComposer], values[kSongwriter]);
        if (rng.bernoulli(spec.version_suffix_rate) && !values[kTitle].empty()) {
          values[kTitle] += std::string(" ") + kSuffixes[rng.below(std::size(kSuffixes))];
        }
      }
      std::snprintf(id, sizeof(id), "e%07zu-%zu", e, k);
      Tuple tuple;
      tuple.record_id = id;
      if (unstructured) {
        std::vector<std::string> parts;
        for (const auto& v : values)
          if (!v.empty()) parts.push_back(v);
        tuple.attributes.push_back(tokenize(join_words(parts)));
      } else {
        for (const auto& v : values) tuple.attributes.push_back(tokenize(v));
      }
      table.tuples.push_back(std::move(tuple));
      ids.emplace_back(id);
    }
    for (std::size_t a = 0; a < ids.size(); ++a)
      for (std::size_t b = a + 1; b < ids.size(); ++b) corpus.labels.insert(ids[a], ids[b]);
  }
  corpus.dataset = Dataset(schema);
  corpus.dataset.add_table(std::move(table));
  return corpus;
}

}  // namespace autoblock
