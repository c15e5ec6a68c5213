#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "autoblock/error.hpp"
#include "autoblock/synth.hpp"
#include "autoblock/training.hpp"
#include "gradcheck.hpp"

using namespace autoblock;

namespace {

// Two-attribute corpus: `good` is shared by an entity's copies and differs
// between entities, `noise` is fresh random text on every record.
SynthCorpus informative_corpus(std::size_t entities, std::uint64_t seed) {
  Rng rng(seed);
  auto word = [&] {
    std::string w;
    for (int i = 0; i < 5; ++i) w += static_cast<char>('a' + rng.below(26));
    return w;
  };
  SynthCorpus out{Dataset({"noise", "good"}), {}};
  Table table{"A", {}};
  for (std::size_t e = 0; e < entities; ++e) {
    const std::string good = word() + " " + word();
    for (int c = 0; c < 2; ++c) {
      Tuple t{"e" + std::to_string(e) + "-" + std::to_string(c),
              {tokenize(word() + " " + word()), tokenize(good)}};
      table.tuples.push_back(t);
    }
    out.labels.insert("e" + std::to_string(e) + "-0", "e" + std::to_string(e) + "-1");
  }
  out.dataset.add_table(table);
  return out;
}

ModelConfig small_model() {
  ModelConfig m;
  m.embedding.dim = 16;
  m.embedding.bucket_count = 4096;
  m.hidden = 8;
  return m;
}

TrainingConfig short_training(std::size_t iterations) {
  TrainingConfig t;
  t.max_iterations = iterations;
  t.batch_size = 16;
  t.learning_rate = 0.01;
  t.log_every = 10;
  return t;
}

std::vector<double> logged_losses(const std::vector<std::string>& lines, std::size_t signature) {
  std::vector<double> out;
  const std::string tag = "signature=" + std::to_string(signature) + " ";
  for (const auto& line : lines) {
    if (line.rfind("step=", 0) != 0 || line.find(tag) == std::string::npos) continue;
    out.push_back(std::stod(line.substr(line.find("loss=") + 5)));
  }
  return out;
}

}  // namespace

TEST_SUITE("training") {
  TEST_CASE("selection probability reference values") {
    std::vector<double> ones(20, 1.0);
    CHECK(selection_probability(1.0, ones) == doctest::Approx(1.0 / 21));
    std::vector<double> zeros(4, 0.0);
    CHECK(selection_probability(1.0, zeros) == doctest::Approx(std::exp(1.0) / (std::exp(1.0) + 4)));
    CHECK(selection_probability(1.0, zeros) == doctest::Approx(0.4046).epsilon(1e-4));
    CHECK(-std::log(selection_probability(0.3, std::vector<double>(20, 0.3))) ==
          doctest::Approx(3.0445).epsilon(1e-4));
    CHECK(selection_probability(1.0, std::vector<double>(20, -1.0), 0.01) == doctest::Approx(1.0));
  }

  TEST_CASE("softmax over scores sums to one") {
    Rng rng(4);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> c(1 + 2 * (1 + rng.below(10)));
      for (double& x : c) x = rng.uniform(-1, 1);
      auto p = selection_probabilities(c, rng.uniform(0.05, 2.0));
      CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("projection onto the usable simplex sphere") {
    auto p = project_weights(std::vector<double>{3, -1, 4}, {true, true, true});
    CHECK(p[0] == doctest::Approx(0.6));
    CHECK(p[1] == 0.0);
    CHECK(p[2] == doctest::Approx(0.8));
    p = project_weights(std::vector<double>{3, 5, 4}, {true, false, true});
    CHECK(p[1] == 0.0);
    CHECK(p[0] == doctest::Approx(0.6));
    p = project_weights(std::vector<double>{-1, -2, 7}, {true, true, false});
    CHECK(p[0] == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(p[1] == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(p[2] == 0.0);
    CHECK_THROWS_AS(project_weights(std::vector<double>{1}, {false}), Error);
  }

  TEST_CASE("negative sampling") {
    Rng rng(1);
    auto all = sample_negatives(6, 1, 4, 10, rng);
    std::sort(all.begin(), all.end());
    CHECK(all == std::vector<std::size_t>{0, 2, 3, 5});

    Rng a(9), b(9);
    CHECK(sample_negatives(100, 3, 7, 10, a) == sample_negatives(100, 3, 7, 10, b));

    // Each of the n-2 eligible indices should appear with probability k/(n-2).
    const std::size_t n = 12, k = 3, trials = 60000;
    std::map<std::size_t, std::size_t> hits;
    Rng rng2(5);
    for (std::size_t t = 0; t < trials; ++t) {
      auto s = sample_negatives(n, 0, 5, k, rng2);
      CHECK(s.size() == k);
      std::sort(s.begin(), s.end());
      CHECK(std::adjacent_find(s.begin(), s.end()) == s.end());
      for (std::size_t x : s) ++hits[x];
    }
    CHECK(hits.count(0) == 0);
    CHECK(hits.count(5) == 0);
    const double expected = static_cast<double>(trials) * k / (n - 2);
    const double sigma = std::sqrt(expected * (1.0 - static_cast<double>(k) / (n - 2)));
    for (auto [x, c] : hits) CHECK(std::abs(static_cast<double>(c) - expected) < 5 * sigma);
  }

  TEST_CASE("gradient matches finite differences") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      auto r = autoblock::testing::check_gradient(seed);
      CHECK(r.checked > 0);
      CHECK(r.worst() < 1e-4);
    }
  }

  TEST_CASE("config validation") {
    TrainingConfig t;
    t.temperature = 0.0;
    CHECK_THROWS_AS(t.validate(), ConfigError);
    t = TrainingConfig{};
    t.batch_size = 0;
    CHECK_THROWS_AS(t.validate(), ConfigError);
    ModelConfig m;
    m.rho = {2.0};
    CHECK_THROWS_AS(m.validate(), ConfigError);
  }

  TEST_CASE("default smoothing favours the title attribute") {
    SignatureModel model = initialize_model({"album", "title"}, small_model(), 1);
    CHECK(model.encoders[0].rho() == 0.0);
    CHECK(model.encoders[1].rho() == 1.0);
    CHECK(model.signature_count() == 0);
    CHECK(initialize_model({"album", "title"}, small_model(), 1) == model);
  }

  TEST_CASE("single attribute yields one signature") {
    SynthSpec spec = SynthSpec::defaults(Regime::unstructured);
    spec.entity_count = 40;
    SynthCorpus corpus = synthesize(spec, 3);
    SignatureModel model = train(corpus.dataset, corpus.labels, small_model(), short_training(20));
    CHECK(model.signature_count() == 1);
    CHECK(model.weights.row(0)[0] == doctest::Approx(1.0));
  }

  TEST_CASE("informative attribute dominates and supports stay disjoint") {
    SynthCorpus corpus = informative_corpus(60, 11);
    std::vector<std::string> lines;
    TrainingConfig t = short_training(80);
    SignatureModel model =
        train(corpus.dataset, corpus.labels, small_model(), t, [&](const std::string& l) { lines.push_back(l); });
    REQUIRE(model.signature_count() >= 1);
    CHECK(model.weights.row(0)[1] > model.weights.row(0)[0]);
    CHECK(model.weights.is_orthogonal());

    auto losses = logged_losses(lines, 1);
    REQUIRE(losses.size() >= 2);
    CHECK(losses.back() < losses.front());
  }

  TEST_CASE("four-attribute corpus trains orthogonal signatures deterministically") {
    SynthSpec spec = SynthSpec::defaults(Regime::dirty);
    spec.entity_count = 50;
    SynthCorpus corpus = synthesize(spec, 2);
    TrainingConfig t = short_training(15);
    t.max_signatures = 4;
    SignatureModel a = train(corpus.dataset, corpus.labels, small_model(), t);
    SignatureModel b = train(corpus.dataset, corpus.labels, small_model(), t);
    CHECK(a.weights.is_orthogonal());
    CHECK(a.signature_count() <= 4);
    CHECK(a == b);
  }

  TEST_CASE("training without labels is an error") {
    SynthCorpus corpus = informative_corpus(5, 1);
    CHECK_THROWS_AS(train(corpus.dataset, LabelSet{}, small_model(), short_training(5)), Error);
  }
}
