#include <doctest.h>

#include "autoblock/data_model.hpp"
#include "autoblock/error.hpp"
#include "fixtures.hpp"

using namespace autoblock;
using autoblock::testing::TempDir;
using autoblock::testing::make_dataset;
using autoblock::testing::read_file;
using autoblock::testing::write_file;
using Tokens = std::vector<std::string>;

TEST_SUITE("data_model") {
  TEST_CASE("csv ingest tokenizes and lowercases every attribute") {
    TempDir dir("dm");
    write_file(dir.file("a.csv"),
               "id,title,artist\n"
               "r1,Hey Jude,The Beatles\n"
               "r2,\"Let It Be, Naked\",The Beatles\n");
    Dataset d = ingest(dir.file("a.csv"), DataFormat::csv, {}, "id");
    REQUIRE(d.size() == 2);
    CHECK(d.schema() == Tokens{"title", "artist"});
    CHECK(d.tuple(0).attributes[0].tokens == Tokens{"hey", "jude"});
    CHECK(d.tuple(1).attributes[0].tokens == Tokens{"let", "it", "be", ",", "naked"});
    CHECK(d.tuple(1).attributes[1].joined() == "the beatles");
    CHECK_FALSE(d.bipartite());
  }

  TEST_CASE("explicit schema selects and orders columns") {
    TempDir dir("dm");
    write_file(dir.file("a.csv"), "title,id,year,artist\nx,r1,1999,y\n");
    Dataset d = ingest(dir.file("a.csv"), DataFormat::csv, {"artist", "title"}, "id");
    CHECK(d.schema() == Tokens{"artist", "title"});
    CHECK(d.tuple(0).attributes[0].tokens == Tokens{"y"});
    CHECK(d.tuple(0).attributes[1].tokens == Tokens{"x"});
    CHECK_THROWS_AS(ingest(dir.file("a.csv"), DataFormat::csv, {"genre"}, "id"), Error);
  }

  TEST_CASE("blank and whitespace cells are missing values") {
    TempDir dir("dm");
    write_file(dir.file("a.tsv"), "id\ttitle\tartist\nr1\t   \tabba\nr2\t\t\n");
    Dataset d = ingest(dir.file("a.tsv"), DataFormat::tsv, {}, "id");
    CHECK(d.tuple(0).attributes[0].missing());
    CHECK(d.tuple(0).attributes[0].length() == 0);
    CHECK_FALSE(d.tuple(0).attributes[1].missing());
    CHECK(d.tuple(1).attributes[0].missing());
    CHECK(d.tuple(1).attributes[1].missing());
  }

  TEST_CASE("jsonl values of several types") {
    TempDir dir("dm");
    write_file(dir.file("a.jsonl"),
               "{\"id\":\"r1\",\"title\":\"Song\",\"year\":1999,\"tags\":[\"a\",\"b\"]}\n"
               "\n"
               "{\"id\":\"r2\",\"title\":null}\n");
    Dataset d = ingest(dir.file("a.jsonl"), DataFormat::jsonl, {}, "id");
    REQUIRE(d.size() == 2);
    CHECK(d.schema() == Tokens{"title", "year", "tags"});
    CHECK(d.tuple(0).attributes[1].tokens == Tokens{"1999"});
    CHECK(d.tuple(0).attributes[2].tokens == Tokens{"a", "b"});
    CHECK(d.tuple(1).attributes[0].missing());
    CHECK(d.tuple(1).attributes[2].missing());
  }

  TEST_CASE("malformed rows name the row") {
    TempDir dir("dm");
    write_file(dir.file("bad.csv"), "id,title\nr1,a\nr2,b,c\n");
    try {
      ingest(dir.file("bad.csv"), DataFormat::csv, {}, "id");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
    write_file(dir.file("bad.jsonl"), "{\"id\":\"r1\"}\n{oops\n");
    CHECK_THROWS_WITH_AS(ingest(dir.file("bad.jsonl"), DataFormat::jsonl, {}, "id"),
                         doctest::Contains("row 2"), Error);
    CHECK_THROWS_AS(ingest(dir.file("missing.csv"), DataFormat::csv, {}, "id"), Error);
  }

  TEST_CASE("duplicate record ids are rejected across tables") {
    TempDir dir("dm");
    write_file(dir.file("a.csv"), "id,title\nr1,a\nr1,b\n");
    CHECK_THROWS_WITH_AS(ingest(dir.file("a.csv"), DataFormat::csv, {}, "id"),
                         doctest::Contains("duplicate record_id 'r1'"), Error);
    write_file(dir.file("b1.csv"), "id,title\nx,a\n");
    write_file(dir.file("b2.csv"), "id,title\nx,b\n");
    CHECK_THROWS_AS(ingest_bipartite(dir.file("b1.csv"), dir.file("b2.csv"), DataFormat::csv, {}, "id"),
                    Error);
  }

  TEST_CASE("bipartite global indexing") {
    TempDir dir("dm");
    write_file(dir.file("a.csv"), "id,title\na1,x\na2,y\n");
    write_file(dir.file("b.csv"), "id,title\nb1,z\n");
    Dataset d = ingest_bipartite(dir.file("a.csv"), dir.file("b.csv"), DataFormat::csv, {}, "id");
    CHECK(d.bipartite());
    CHECK(d.size() == 3);
    CHECK(d.table_offset(1) == 2);
    CHECK(d.table_of(2) == 1);
    CHECK(d.tuple(2).record_id == "b1");
    CHECK(*d.find("a2") == 1);
    CHECK_FALSE(d.find("nope"));
  }

  TEST_CASE("subset keeps table membership and order") {
    Dataset d = make_dataset({"t"}, {{"a", "1"}, {"b", "2"}, {"c", "3"}});
    Dataset s = d.subset({2, 0, 2});
    REQUIRE(s.size() == 2);
    CHECK(s.tuple(0).record_id == "a");
    CHECK(s.tuple(1).record_id == "c");
  }

  TEST_CASE("labels are canonical and validated") {
    TempDir dir("dm");
    Dataset d = make_dataset({"t"}, {{"a", "x"}, {"b", "y"}, {"c", "z"}});
    write_file(dir.file("l.csv"), "id_a,id_b\nb,a\na,b\nc,a\n");
    LabelSet labels = load_labels(dir.file("l.csv"), d);
    CHECK(labels.size() == 2);
    CHECK(labels.contains("a", "b"));
    CHECK(labels.contains("b", "a"));
    CHECK_FALSE(labels.contains("b", "c"));
    CHECK(labels.pairs().begin()->first == "a");

    write_file(dir.file("u.csv"), "id_a,id_b\na,b\na,zz\n");
    CHECK_THROWS_WITH_AS(load_labels(dir.file("u.csv"), d), doctest::Contains("line 3"), Error);
    write_file(dir.file("s.csv"), "id_a,id_b\na,a\n");
    CHECK_THROWS_WITH_AS(load_labels(dir.file("s.csv"), d), doctest::Contains("self-pair"), Error);
    CHECK_THROWS_AS(canonical_pair("q", "q"), Error);

    write_file(dir.file("t.tsv"), "id_a\tid_b\na\tc\n");
    CHECK(load_labels(dir.file("t.tsv"), d).contains("c", "a"));
  }

  TEST_CASE("label round trip") {
    TempDir dir("dm");
    Dataset d = make_dataset({"t"}, {{"a", "x"}, {"b", "y"}, {"c", "z"}});
    LabelSet labels;
    labels.insert("c", "a");
    labels.insert("b", "c");
    save_labels(labels, dir.file("l.csv"));
    CHECK(read_file(dir.file("l.csv")) == "id_a,id_b\na,c\nb,c\n");
    CHECK(load_labels(dir.file("l.csv"), d) == labels);
  }

  TEST_CASE("export then ingest reproduces the tokens") {
    TempDir dir("dm");
    Dataset d = make_dataset({"title", "artist"},
                             {{"r1", "Don't Stop, Believin'", "Journey"}, {"r2", "", "Smith, Jr.\tand co"}});
    for (DataFormat f : {DataFormat::csv, DataFormat::tsv, DataFormat::jsonl}) {
      const std::string path = dir.file("out");
      export_table(d, 0, path, f, "id");
      Dataset back = ingest(path, f, {}, "id");
      CHECK(back == d);
    }
  }

  TEST_CASE("format names") {
    CHECK(parse_format("tsv") == DataFormat::tsv);
    CHECK(format_from_path("x.jsonl") == DataFormat::jsonl);
    CHECK(format_from_path("x.txt") == DataFormat::csv);
    CHECK_THROWS_AS(parse_format("xml"), ConfigError);
  }
}
