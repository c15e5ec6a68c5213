#include <doctest.h>

#include <chrono>
#include <sstream>

#include "autoblock/blocking.hpp"
#include "autoblock/config.hpp"
#include "autoblock/error.hpp"
#include "autoblock/evaluation.hpp"
#include "autoblock/model_io.hpp"
#include "autoblock/synth.hpp"
#include "autoblock/training.hpp"
#include "cli.hpp"
#include "fixtures.hpp"

using namespace autoblock;
using autoblock::testing::TempDir;
using autoblock::testing::read_file;
using autoblock::testing::run_cli;
using autoblock::testing::write_file;

namespace {

SignatureModel tiny_model() {
  SynthSpec spec = SynthSpec::defaults(Regime::dirty);
  spec.entity_count = 20;
  SynthCorpus c = synthesize(spec, 1);
  ModelConfig m;
  m.embedding.dim = 8;
  m.embedding.bucket_count = 256;
  m.hidden = 4;
  TrainingConfig t;
  t.max_iterations = 5;
  t.batch_size = 8;
  SignatureModel model = train(c.dataset, c.labels, m, t);
  model.metadata = {{"train.seed", "1"}, {"note", "x"}};
  return model;
}

std::string save_bytes(const SignatureModel& model) {
  std::ostringstream out;
  save_model(model, out);
  return out.str();
}

// Small training corpus plus the flags every CLI call here shares.
struct CliFixture {
  TempDir dir{"cli"};
  std::string records = dir.file("data/records.csv");
  std::string labels = dir.file("data/labels.csv");
  std::string train_flags = "--set model.dim=8 --set model.buckets=1024 --set model.hidden=4 "
                            "--set train.batch_size=8 --iterations 10";

  CliFixture() {
    const int code = run_cli("synth --entities 34 --duplicates 2 --seed 3 -o " + dir.file("data"), dir.file("synth.log"));
    REQUIRE(code == 0);
  }
  std::string data() const { return "-i " + records + " -l " + labels; }
};

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("defaults, file, then overrides") {
    TempDir dir("cfg");
    write_file(dir.file("run.ini"),
               "[model]\ndim = 32\nhidden = 16\n\n[train]\nlearning_rate = 0.01\niterations = 50\n"
               "[block]\ntheta = 0.7\n[data]\nschema = title, album\n");
    RunConfig c = load_config(dir.file("run.ini"), {"train.iterations=75", "block.tables=4"});
    CHECK(c.model.embedding.dim == 32);
    CHECK(c.model.hidden == 16);
    CHECK(c.train.learning_rate == doctest::Approx(0.01));
    CHECK(c.train.max_iterations == 75);
    CHECK(c.block.theta == doctest::Approx(0.7));
    CHECK(c.block.lsh.tables == 4);
    CHECK(c.data.schema == std::vector<std::string>{"title", "album"});
    CHECK(c.train.batch_size == TrainingConfig{}.batch_size);

    RunConfig base;
    base.train.batch_size = 7;
    CHECK(load_config("", {}, base).train.batch_size == 7);
    CHECK(load_config(dir.file("run.ini"), {}, base).train.batch_size == 7);
  }

  TEST_CASE("bad settings are rejected with the field name") {
    TempDir dir("cfg");
    CHECK_THROWS_WITH_AS(load_config("", {"train.speed=3"}), doctest::Contains("train.speed"), ConfigError);
    CHECK_THROWS_WITH_AS(load_config("", {"model.dim=abc"}), doctest::Contains("model.dim"), ConfigError);
    CHECK_THROWS_WITH_AS(load_config("", {"block.theta=1.5"}), doctest::Contains("block.theta"), ConfigError);
    CHECK_THROWS_AS(load_config("", {"no-equals"}), ConfigError);
    CHECK_THROWS_AS(load_config("", {"data.mode=triple"}), ConfigError);
    CHECK_THROWS_AS(load_config(dir.file("absent.ini"), {}), ConfigError);
    write_file(dir.file("bad.ini"), "[train]\nwarp = 9\n");
    CHECK_THROWS_WITH_AS(load_config(dir.file("bad.ini"), {}), doctest::Contains("train.warp"), ConfigError);
    CHECK_THROWS_AS(load_config("", {"baseline.verify=maybe"}), ConfigError);
  }

  TEST_CASE("snapshot covers model and training keys") {
    RunConfig c = load_config("", {"train.seed=42"});
    auto snap = c.snapshot();
    bool seed = false;
    for (const auto& [k, v] : snap) {
      CHECK((k.rfind("model.", 0) == 0 || k.rfind("train.", 0) == 0));
      if (k == "train.seed") seed = v == "42";
    }
    CHECK(seed);
  }

  TEST_CASE("list splitting trims blanks") {
    CHECK(split_list(" a, b ,,c ") == std::vector<std::string>{"a", "b", "c"});
    CHECK(split_list("").empty());
  }
}

TEST_SUITE("model_io") {
  TEST_CASE("save, load, save is byte-identical") {
    SignatureModel model = tiny_model();
    const std::string first = save_bytes(model);
    std::istringstream in(first);
    SignatureModel back = load_model(in);
    CHECK(save_bytes(back) == first);
    CHECK(back == round_trip(model));
    CHECK(back.schema == model.schema);
    CHECK(back.metadata == model.metadata);
    CHECK(back.signature_count() == model.signature_count());
    REQUIRE(back.encoders.size() == model.encoders.size());
    for (std::size_t j = 0; j < back.encoders.size(); ++j) {
      CHECK(back.encoders[j].rho() == model.encoders[j].rho());
      for (std::size_t p = 0; p < back.encoders[j].param_count(); ++p)
        CHECK(back.encoders[j].params()[p] == static_cast<double>(static_cast<float>(model.encoders[j].params()[p])));
    }
  }

  TEST_CASE("pretrained vectors survive the round trip") {
    SignatureModel model = tiny_model();
    std::vector<double> v(8, 0.25);
    model.embeddings.add_pretrained("hello", v);
    SignatureModel back = round_trip(model);
    CHECK(back.embeddings.is_pretrained("hello"));
    CHECK(back.embeddings.embed("hello") == v);
  }

  TEST_CASE("corrupt or foreign files fail loudly") {
    const std::string bytes = save_bytes(tiny_model());
    std::string version = bytes;
    version[8] = 2;
    std::istringstream a(version);
    CHECK_THROWS_WITH_AS(load_model(a), doctest::Contains("version"), Error);
    std::string magic = bytes;
    magic[0] = 'X';
    std::istringstream b(magic);
    CHECK_THROWS_AS(load_model(b), Error);
    std::istringstream c(bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS_AS(load_model(c), Error);
    std::istringstream d(bytes + "x");
    CHECK_THROWS_AS(load_model(d), Error);
    CHECK_THROWS_AS(load_model(std::string("/nonexistent/model.bin")), Error);
  }

  TEST_CASE("schema differences are listed") {
    CHECK(schema_difference({"a", "b"}, {"a", "b"}).empty());
    const std::string diff = schema_difference({"title", "album"}, {"title", "genre"});
    CHECK(diff.find("missing from data: album") != std::string::npos);
    CHECK(diff.find("not in model: genre") != std::string::npos);
    CHECK(schema_difference({"a", "b"}, {"b", "a"}).find("different order") != std::string::npos);
  }
}

TEST_SUITE("cli") {
  TEST_CASE("synth writes the counted corpus reproducibly") {
    TempDir dir("cli");
    REQUIRE(run_cli("synth --entities 1000 --duplicates 2 --seed 5 -o " + dir.file("a"), dir.file("a.log")) == 0);
    REQUIRE(run_cli("synth --entities 1000 --duplicates 2 --seed 5 -o " + dir.file("b"), dir.file("b.log")) == 0);
    CHECK(read_file(dir.file("a.log")).find("records=3000 labels=3000") != std::string::npos);
    CHECK(read_file(dir.file("a/records.csv")) == read_file(dir.file("b/records.csv")));
    CHECK(read_file(dir.file("a/labels.csv")) == read_file(dir.file("b/labels.csv")));

    REQUIRE(run_cli("synth --entities 10 --set synth.typo_rate=0 --set synth.token_drop_rate=0 "
                    "--set synth.missing_attr_rate=0 --set synth.attr_swap_rate=0 "
                    "--set synth.version_suffix_rate=0 -o " + dir.file("z"),
                    dir.file("z.log")) == 0);
    Dataset z = ingest(dir.file("z/records.csv"), DataFormat::csv, {}, "id");
    for (std::size_t t = 0; t < z.size(); t += 3) CHECK(z.tuple(t + 1).attributes == z.tuple(t).attributes);
  }

  TEST_CASE("train is deterministic and fast on a small fixture") {
    CliFixture f;
    const auto start = std::chrono::steady_clock::now();
    REQUIRE(run_cli("train " + f.data() + " " + f.train_flags + " -m " + f.dir.file("m1.bin"), f.dir.file("t1.log")) == 0);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(seconds < 60.0);
    REQUIRE(run_cli("train " + f.data() + " " + f.train_flags + " -m " + f.dir.file("m2.bin"), f.dir.file("t2.log")) == 0);
    CHECK(read_file(f.dir.file("m1.bin")) == read_file(f.dir.file("m2.bin")));
    CHECK(read_file(f.dir.file("t1.log")).find("signatures=") != std::string::npos);
    CHECK(read_file(f.dir.file("t1.log")).find("step=") != std::string::npos);

    // One worker gives the same model.
    REQUIRE(run_cli("train " + f.data() + " " + f.train_flags + " --workers 1 -m " + f.dir.file("m3.bin"),
                    f.dir.file("t3.log")) == 0);
    CHECK(read_file(f.dir.file("m1.bin")) == read_file(f.dir.file("m3.bin")));
  }

  TEST_CASE("block output is reproducible and shrinks with theta") {
    CliFixture f;
    REQUIRE(run_cli("train " + f.data() + " " + f.train_flags + " -m " + f.dir.file("m.bin"), f.dir.file("t.log")) == 0);
    const std::string base = "block -i " + f.records + " -m " + f.dir.file("m.bin");
    REQUIRE(run_cli(base + " --theta 0.8 -o " + f.dir.file("c1.csv"), f.dir.file("b1.log")) == 0);
    REQUIRE(run_cli(base + " --theta 0.8 -o " + f.dir.file("c2.csv"), f.dir.file("b2.log")) == 0);
    REQUIRE(run_cli(base + " --theta 0.99 -o " + f.dir.file("c3.csv"), f.dir.file("b3.log")) == 0);
    CHECK(read_file(f.dir.file("c1.csv")) == read_file(f.dir.file("c2.csv")));
    CHECK(read_file(f.dir.file("b1.log")).find("candidates=") != std::string::npos);
    CandidateSet loose = read_candidates(f.dir.file("c1.csv"));
    CandidateSet tight = read_candidates(f.dir.file("c3.csv"));
    CHECK(tight.size() <= loose.size());
    for (const auto& [pair, prov] : tight.pairs()) CHECK(loose.contains(pair.first, pair.second));

    // Empty input: header-only candidates.
    write_file(f.dir.file("empty.csv"), "id,title,album,composer,songwriter\n");
    REQUIRE(run_cli("block -i " + f.dir.file("empty.csv") + " -m " + f.dir.file("m.bin") + " -o " + f.dir.file("e.csv"),
                    f.dir.file("e.log")) == 0);
    CHECK(read_file(f.dir.file("e.csv")).rfind("id_a,id_b", 0) == 0);
    CHECK(read_candidates(f.dir.file("e.csv")).empty());

    // Schema mismatch names the attributes.
    write_file(f.dir.file("other.csv"), "id,title,genre\nx,a,b\n");
    CHECK(run_cli("block -i " + f.dir.file("other.csv") + " -m " + f.dir.file("m.bin") + " -o " + f.dir.file("o.csv"),
                  f.dir.file("o.log")) == 1);
    CHECK(read_file(f.dir.file("o.log")).find("album") != std::string::npos);

    REQUIRE(run_cli("index -i " + f.records + " -m " + f.dir.file("m.bin") + " -o " + f.dir.file("i.bin"),
                    f.dir.file("i.log")) == 0);
    CHECK(LshIndex::load(f.dir.file("i.bin")).size() > 0);
    REQUIRE(run_cli("inspect -i " + f.records + " -m " + f.dir.file("m.bin") + " -n 2 -o " + f.dir.file("w.csv"),
                    f.dir.file("w.log")) == 0);
    CHECK(read_file(f.dir.file("w.csv")).rfind("record_id,attribute,weights\n", 0) == 0);
  }

  TEST_CASE("eval scores candidate files and experiment runs") {
    CliFixture f;
    // The label file itself as candidates gives recall 1.
    REQUIRE(run_cli("eval " + f.data() + " --candidates " + f.labels + " --method labels -o " + f.dir.file("m.csv"),
                    f.dir.file("e.log")) == 0);
    auto rows = read_metrics(f.dir.file("m.csv"));
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].recall == doctest::Approx(1.0));
    CHECK(rows[0].pe_ratio == doctest::Approx(102.0 / 102.0));

    // Hand count: one of the first entity's three pairs.
    write_file(f.dir.file("c.csv"), "id_a,id_b\ne0000000-0,e0000000-1\ne0000001-0,e0000005-0\n");
    REQUIRE(run_cli("eval " + f.data() + " --candidates " + f.dir.file("c.csv") + " -o " + f.dir.file("h.csv"),
                    f.dir.file("h.log")) == 0);
    rows = read_metrics(f.dir.file("h.csv"));
    CHECK(rows[0].recall == doctest::Approx(1.0 / 102));
    CHECK(rows[0].pe_ratio == doctest::Approx(2.0 / 102));

    REQUIRE(run_cli("eval " + f.data() + " --method key:title --method minhash:0.5 --repeats 5 -o " +
                        f.dir.file("x.csv") + " --report " + f.dir.file("r.csv"),
                    f.dir.file("x.log")) == 0);
    CHECK(read_metrics(f.dir.file("x.csv")).size() == 10);
    CHECK(read_file(f.dir.file("r.csv")).find("key:title") != std::string::npos);
  }

  TEST_CASE("baselines from the command line") {
    TempDir dir("cli");
    write_file(dir.file("r.csv"),
               "id,title\n"
               "a,the long and winding road again\n"
               "b,the long and winding road agian\n"
               "c,the long and winding road again\n"
               "d,yesterday\n");
    REQUIRE(run_cli("baseline -i " + dir.file("r.csv") + " --method key --key title -o " + dir.file("k.csv"),
                    dir.file("k.log")) == 0);
    CandidateSet k = read_candidates(dir.file("k.csv"));
    CHECK(k.size() == 1);
    CHECK(k.contains("a", "c"));

    REQUIRE(run_cli("baseline -i " + dir.file("r.csv") + " --method minhash --theta 0.6 -o " + dir.file("m6.csv"),
                    dir.file("m6.log")) == 0);
    REQUIRE(run_cli("baseline -i " + dir.file("r.csv") + " --method minhash --theta 0.99 -o " + dir.file("m99.csv"),
                    dir.file("m99.log")) == 0);
    CandidateSet m6 = read_candidates(dir.file("m6.csv"));
    CandidateSet m99 = read_candidates(dir.file("m99.csv"));
    CHECK(m6.contains("a", "b"));
    for (const auto& [pair, prov] : m99.pairs()) CHECK(m6.contains(pair.first, pair.second));
    CHECK(m99.contains("a", "c"));
  }

  TEST_CASE("exit codes") {
    CliFixture f;
    const std::string missing = f.dir.file("nope/labels.csv");
    CHECK(run_cli("train -i " + f.records + " -l " + missing + " -m " + f.dir.file("m.bin"), f.dir.file("1.log")) == 2);
    CHECK(read_file(f.dir.file("1.log")).find(missing) != std::string::npos);
    CHECK(run_cli("eval " + f.data() + " --method nonsense -o " + f.dir.file("x.csv"), f.dir.file("2.log")) == 2);
    CHECK(run_cli("baseline -i " + f.records + " --method magic -o " + f.dir.file("x.csv"), f.dir.file("3.log")) == 2);
    CHECK(run_cli("train " + f.data() + " --set train.bogus=1 -m " + f.dir.file("m.bin"), f.dir.file("4.log")) == 2);
    CHECK(run_cli("frobnicate", f.dir.file("5.log")) == 2);
    CHECK(run_cli("block -i " + f.records + " -m " + f.dir.file("absent.bin") + " -o " + f.dir.file("c.csv"),
                  f.dir.file("6.log")) == 2);
    write_file(f.dir.file("junk.bin"), "not a model");
    CHECK(run_cli("block -i " + f.records + " -m " + f.dir.file("junk.bin") + " -o " + f.dir.file("c.csv"),
                  f.dir.file("7.log")) == 1);
    CHECK(run_cli("--version", f.dir.file("8.log")) == 0);
  }
}
