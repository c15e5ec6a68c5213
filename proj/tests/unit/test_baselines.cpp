#include <doctest.h>

#include <cmath>

#include "autoblock/baselines.hpp"
#include "autoblock/error.hpp"
#include "fixtures.hpp"

using namespace autoblock;
using autoblock::testing::make_dataset;

namespace {

// Exhaustive oracle: every pair whose raw key strings agree.
CandidateSet brute_force_key(const Dataset& d, const std::vector<std::size_t>& cols) {
  CandidateSet out;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = i + 1; j < d.size(); ++j) {
      bool equal = true;
      for (std::size_t c : cols) {
        const auto& a = d.tuple(i).attributes[c];
        const auto& b = d.tuple(j).attributes[c];
        if (a.missing() || b.missing() || a.tokens != b.tokens) equal = false;
      }
      if (equal) out.insert(d.tuple(i).record_id, d.tuple(j).record_id);
    }
  return out;
}

std::set<std::string> numbered(std::size_t from, std::size_t to) {
  std::set<std::string> s;
  for (std::size_t i = from; i < to; ++i) s.insert("e" + std::to_string(i));
  return s;
}

Dataset random_titles(std::size_t n, std::size_t vocabulary, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < n; ++i) {
    auto pick = [&] { return rng.bernoulli(0.1) ? std::string() : "w" + std::to_string(rng.below(vocabulary)); };
    rows.push_back({"r" + std::to_string(i), pick(), pick()});
  }
  return make_dataset({"title", "album"}, rows);
}

}  // namespace

TEST_SUITE("baselines") {
  TEST_CASE("key parsing") {
    std::vector<std::string> schema{"title", "album", "composer"};
    CHECK(KeySpec::parse("title", schema).kind == KeySpec::Kind::single);
    KeySpec c = KeySpec::parse("title+album", schema);
    CHECK(c.kind == KeySpec::Kind::conjunction);
    CHECK(c.attributes == std::vector<std::string>{"title", "album"});
    KeySpec all = KeySpec::parse("all", schema);
    CHECK(all.kind == KeySpec::Kind::disjunction);
    CHECK(all.attributes == schema);
    CHECK_THROWS_AS(KeySpec::parse("genre", schema), ConfigError);
    CHECK_THROWS_AS(KeySpec::parse("title|album+composer", schema), ConfigError);
    CHECK_THROWS_AS(KeySpec::parse("", schema), ConfigError);
  }

  TEST_CASE("key blocking small examples") {
    Dataset d = make_dataset({"title", "album"}, {{"a", "Hey Jude", "Past Masters"},
                                                 {"b", "hey  jude", "1"},
                                                 {"c", "Yesterday", "1"},
                                                 {"d", "", "Help"},
                                                 {"e", "", "Help"}});
    CandidateSet t = key_block(d, KeySpec::parse("title", d.schema()));
    CHECK(t.size() == 1);
    CHECK(t.contains("a", "b"));
    CandidateSet conj = key_block(d, KeySpec::parse("title+album", d.schema()));
    CHECK(conj.empty());
    CandidateSet disj = key_block(d, KeySpec::parse("title|album", d.schema()));
    CHECK(disj.size() == 3);
    CHECK(disj.contains("b", "c"));
    CHECK(disj.contains("d", "e"));
  }

  TEST_CASE("key blocking equals an exhaustive join") {
    Dataset d = random_titles(1000, 60, 4);
    CHECK(key_block(d, KeySpec::parse("title", d.schema())) == brute_force_key(d, {0}));
    CHECK(key_block(d, KeySpec::parse("title+album", d.schema())) == brute_force_key(d, {0, 1}));
    CandidateSet disj = brute_force_key(d, {0});
    disj.merge(brute_force_key(d, {1}));
    CHECK(key_block(d, KeySpec::parse("all", d.schema())) == disj);
  }

  TEST_CASE("representative set of token n-grams") {
    auto s = representative_set(tokenize("a b c a"), 3);
    std::set<std::string> expected{"a", "b", "c", "a b", "b c", "c a", "a b c", "b c a"};
    CHECK(s == expected);
    CHECK(representative_set(AttributeValue{}, 3).empty());
    CHECK(representative_set(tokenize("x y"), 1) == std::set<std::string>{"x", "y"});
  }

  TEST_CASE("exact Jaccard") {
    CHECK(jaccard(numbered(0, 4), numbered(2, 6)) == doctest::Approx(2.0 / 6));
    CHECK(jaccard({}, {}) == 0.0);
    CHECK(jaccard(numbered(0, 3), numbered(0, 3)) == 1.0);
  }

  TEST_CASE("sketch agreement estimates Jaccard") {
    MinHasher h(10000, 7);
    struct Case {
      std::set<std::string> a, b;
      double j;
    };
    // |A n B| / |A u B| with 300 shared elements.
    std::vector<Case> cases{{numbered(0, 400), numbered(100, 500), 300.0 / 500},
                            {numbered(0, 200), numbered(100, 300), 100.0 / 300},
                            {numbered(0, 350), numbered(50, 400), 300.0 / 400}};
    for (const auto& c : cases) {
      CHECK(jaccard(c.a, c.b) == doctest::Approx(c.j));
      CHECK(std::abs(estimate_jaccard(h.sketch(c.a), h.sketch(c.b)) - c.j) <= 0.02);
    }
    CHECK(h.sketch({}) == std::vector<std::uint64_t>(10000, ~std::uint64_t{0}));
    CHECK(MinHasher(16, 3).sketch(numbered(0, 5)) == MinHasher(16, 3).sketch(numbered(0, 5)));
  }

  TEST_CASE("verified MinHash keeps only pairs at the threshold") {
    Dataset d = make_dataset({"title"}, {{"a", "the long and winding road"},
                                         {"b", "the long and winding road remastered"},
                                         {"c", "long and winding"},
                                         {"d", "something else entirely"}});
    MinHashParams p;
    for (double theta : {0.3, 0.5, 0.7}) {
      CandidateSet c = minhash_block(d, {0}, theta, p);
      for (const auto& [pair, prov] : c.pairs()) {
        const double j = jaccard(representative_set(d.tuple(*d.find(pair.first)), 0, 3),
                                 representative_set(d.tuple(*d.find(pair.second)), 0, 3));
        CHECK(j >= theta);
      }
    }
    CHECK(minhash_block(d, {0}, 0.5, p).contains("a", "b"));
    CHECK_THROWS_AS(minhash_block(d, {0}, 0.0, p), ConfigError);
  }

  TEST_CASE("raising the MinHash threshold gives subsets") {
    Dataset d = random_titles(400, 30, 9);
    MinHashParams p;
    CandidateSet previous = minhash_block(d, {0, 1}, 0.2, p);
    for (double theta : {0.4, 0.6, 0.8}) {
      CandidateSet c = minhash_block(d, {0, 1}, theta, p);
      for (const auto& [pair, prov] : c.pairs()) CHECK(previous.contains(pair.first, pair.second));
      previous = c;
    }
  }

  TEST_CASE("parameter validation") {
    MinHashParams p;
    p.rows = 0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
  }
}
