#include <doctest.h>

#include <algorithm>
#include <set>

#include "autoblock/error.hpp"
#include "autoblock/text_embedding.hpp"
#include "fixtures.hpp"

using namespace autoblock;
using autoblock::testing::TempDir;
using autoblock::testing::write_file;

namespace {

// Brute-force enumeration of every contiguous substring of the wrapped
// token, kept when its length is in range, plus the wrapped token.
std::multiset<std::string> enumerate_grams(const std::string& token, int lo, int hi) {
  const std::string w = "<" + token + ">";
  std::multiset<std::string> out;
  for (std::size_t a = 0; a < w.size(); ++a)
    for (std::size_t b = a + 1; b <= w.size(); ++b) {
      const int len = static_cast<int>(b - a);
      if (len >= lo && len <= hi) out.insert(w.substr(a, b - a));
    }
  if (!out.count(w)) out.insert(w);
  return out;
}

EmbeddingConfig small_config() {
  EmbeddingConfig c;
  c.dim = 6;
  c.bucket_count = 256;
  return c;
}

}  // namespace

TEST_SUITE("text_embedding") {
  TEST_CASE("n-grams of dylan") {
    auto g = ngrams("dylan", 3, 5);
    CHECK(g.size() == 13);
    auto expected = enumerate_grams("dylan", 3, 5);
    CHECK(std::multiset<std::string>(g.begin(), g.end()) == expected);
    CHECK(std::count(g.begin(), g.end(), "<dy") == 1);
    CHECK(std::count(g.begin(), g.end(), "<dylan>") == 1);
  }

  TEST_CASE("short tokens contribute the wrapped token once") {
    auto g = ngrams("a", 3, 5);
    CHECK(g == std::vector<std::string>{"<a>"});
    for (const std::string t : {"ab", "abc", "abcdefgh", "x1"}) {
      auto got = ngrams(t, 3, 5);
      CHECK(std::multiset<std::string>(got.begin(), got.end()) == enumerate_grams(t, 3, 5));
    }
  }

  TEST_CASE("n-grams count code points, not bytes") {
    auto g = ngrams("\xc3\xa9t\xc3\xa9", 3, 3);  // "été"
    REQUIRE(g.size() == 4);
    CHECK(g[0] == "<\xc3\xa9t");
    CHECK(g.back() == "<\xc3\xa9t\xc3\xa9>");
  }

  TEST_CASE("invalid n-gram range") {
    CHECK_THROWS_AS(ngrams("x", 4, 3), Error);
    EmbeddingConfig c = small_config();
    c.bucket_count = 100;
    CHECK_THROWS_AS(EmbeddingTable(c, 1), Error);
  }

  TEST_CASE("token vector is the sum of its bucket rows") {
    EmbeddingTable table(small_config(), 7);
    const std::string token = "dylan";
    std::vector<double> expected(6, 0.0);
    for (const auto& g : ngrams(token, 3, 5)) {
      const std::size_t b = murmur64(g, kDefaultHashSeed) & 255;
      for (std::size_t k = 0; k < 6; ++k) expected[k] += table.row(b)[k];
    }
    auto v = table.embed(token);
    for (std::size_t k = 0; k < 6; ++k) CHECK(v[k] == doctest::Approx(expected[k]).epsilon(1e-15));
    CHECK(table.buckets(token).size() == 13);
    CHECK(embed_token(table, token) == v);
  }

  TEST_CASE("rows start in the small uniform range") {
    EmbeddingTable table(small_config(), 3);
    for (double x : table.rows()) {
      CHECK(x >= -1.0 / 6);
      CHECK(x <= 1.0 / 6);
    }
    EmbeddingTable again(small_config(), 3);
    CHECK(again == table);
    EmbeddingTable zeros = EmbeddingTable::zeros(small_config());
    CHECK(zeros.embed("anything") == std::vector<double>(6, 0.0));
  }

  TEST_CASE("pretrained vectors take precedence") {
    TempDir dir("emb");
    write_file(dir.file("v.vec"), "2 4\nhello 1 2 3 4\nworld 0.5 -0.5 0 1\n");
    EmbeddingTable table = load_pretrained(dir.file("v.vec"), small_config(), 9);
    CHECK(table.dim() == 4);
    CHECK(table.pretrained_count() == 2);
    CHECK(table.embed("hello") == std::vector<double>{1, 2, 3, 4});
    CHECK(table.buckets("hello").empty());
    CHECK(table.is_pretrained("world"));
    CHECK_FALSE(table.is_pretrained("other"));
    CHECK(table.buckets("other").size() == ngrams("other", 3, 5).size());
  }

  TEST_CASE("pretrained file errors") {
    TempDir dir("emb");
    write_file(dir.file("bad.vec"), "a 1 2 3\nb 1 2\n");
    CHECK_THROWS_WITH_AS(load_pretrained(dir.file("bad.vec"), small_config(), 1),
                         doctest::Contains("inconsistent dimension at line 2"), Error);
    write_file(dir.file("nan.vec"), "a 1 x\n");
    CHECK_THROWS_AS(load_pretrained(dir.file("nan.vec"), small_config(), 1), Error);
    write_file(dir.file("empty.vec"), "\n");
    CHECK_THROWS_AS(load_pretrained(dir.file("empty.vec"), small_config(), 1), Error);
    CHECK_THROWS_AS(load_pretrained(dir.file("none.vec"), small_config(), 1), Error);
  }
}
