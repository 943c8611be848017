#include <doctest.h>

#include <algorithm>
#include <set>

#include "../support.hpp"
#include "suffbench/corpus.hpp"
#include "suffbench/error.hpp"
#include "suffbench/text.hpp"

using namespace suffbench;
using suffbench::testing::data_dir;

namespace {

std::string record(const std::string& id, int n_choices, const std::string& key = "A") {
  nlohmann::json choices = nlohmann::json::array();
  for (int i = 0; i < n_choices; ++i) {
    choices.push_back({{"text", "opt" + std::to_string(i)}, {"label", std::string(1, static_cast<char>('A' + i))}});
  }
  return nlohmann::json{{"id", id}, {"question", {{"stem", "Q?"}, {"choices", choices}}}, {"answerKey", key}}.dump();
}

std::string error_of(const std::string& jsonl) {
  try {
    parse_corpus(jsonl, Language::en, "mem.jsonl");
  } catch (const CorpusError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("english fixture loads in file order") {
  Corpus c = load_corpus(data_dir() / "arc_fixture_en.jsonl", Language::en);
  REQUIRE(c.size() == 10);
  CHECK(c.language == Language::en);
  CHECK(c.items.front().id == "Mercury_7001");
  CHECK(c.items.back().id == "Mercury_7010");
  std::string golds;
  for (const auto& q : c.items) golds += to_char(q.gold);
  CHECK(golds == "ABCDABCADB");
  CHECK(c.items[0].option(Label::A) == "sunlight");
}

TEST_CASE("persian fixture remaps digit labels") {
  Corpus fa = load_corpus(data_dir() / "arc_fixture_fa.jsonl", Language::fa);
  Corpus en = load_corpus(data_dir() / "arc_fixture_en.jsonl", Language::en);
  REQUIRE(fa.size() == 10);
  for (std::size_t i = 0; i < fa.size(); ++i) {
    CHECK(fa.items[i].id == en.items[i].id);
    CHECK(fa.items[i].gold == en.items[i].gold);
    CHECK(fa.items[i].language == Language::fa);
  }
}

TEST_CASE("digit answer keys follow choice order") {
  Corpus c = load_corpus(data_dir() / "arc_digit_labels.jsonl", Language::en);
  REQUIRE(c.size() == 3);
  CHECK(c.items[0].gold == Label::C);
  CHECK(c.items[1].gold == Label::A);
  CHECK(c.items[2].gold == Label::D);
  CHECK(c.items[0].option(Label::C) == "a candle flame");
}

TEST_CASE("corpus errors carry line numbers") {
  std::string good = record("q1", 4);
  CHECK(error_of(good + "\n" + record("q2", 3)).find("mem.jsonl:2:") == 0);
  CHECK(error_of(good + "\n" + record("q2", 3)).find("exactly 4 choices") != std::string::npos);
  CHECK(error_of(good + "\n\n" + good).find("mem.jsonl:3: duplicate id") == 0);
  CHECK(error_of(record("q1", 4, "E")).find("mem.jsonl:1:") == 0);
  CHECK(error_of("{not json").find("malformed JSON") != std::string::npos);
  CHECK(error_of(record("q1", 5)).find("found 5") != std::string::npos);
  CHECK_THROWS_AS(load_corpus(data_dir() / "no_such_file.jsonl", Language::en), CorpusError);
}

TEST_CASE("empty input gives an empty corpus") {
  CHECK(parse_corpus("", Language::en, "empty").empty());
  CHECK(parse_corpus("\n  \n", Language::en, "blank").empty());
}

TEST_CASE("text is NFC normalized on load") {
  // e + combining acute must come back precomposed.
  nlohmann::json rec = {{"id", "n1"},
                        {"question",
                         {{"stem", "Caf\x65\xcc\x81?"},
                          {"choices",
                           {{{"text", "a"}, {"label", "A"}},
                            {{"text", "b"}, {"label", "B"}},
                            {{"text", "c"}, {"label", "C"}},
                            {{"text", "d"}, {"label", "D"}}}}}},
                        {"answerKey", "B"}};
  Corpus c = parse_corpus(rec.dump(), Language::en, "nfc");
  CHECK(c.items[0].stem == "Caf\xc3\xa9?");
}

TEST_CASE("nfc keeps heh plus hamza above decomposed") {
  const std::string heh_hamza = "\xd9\x87\xd9\x94";  // U+0647 U+0654
  CHECK(text::nfc(heh_hamza) == heh_hamza);
  CHECK(text::nfc("\xdb\x95\xd9\x94") == "\xdb\x80");  // U+06D5 U+0654 composes to U+06C0
  CHECK(text::nfc("\xdb\x80") == "\xdb\x80");
}

TEST_CASE("word spans split on unicode whitespace only") {
  CHECK(text::word_spans("  a  bb\tc\n").size() == 3);
  CHECK(text::word_spans("\xd9\x85\xdb\x8c\xe2\x80\x8c\xd8\xb1\xd9\x88\xd8\xaf").size() == 1);  // ZWNJ joins
  CHECK(text::word_spans("x\xc2\xa0y").size() == 2);                                          // NBSP splits
  CHECK(text::word_spans("").empty());
}

TEST_CASE("subset matches the reference sampler") {
  Corpus c = load_corpus(data_dir() / "arc_fixture_en.jsonl", Language::en);
  Corpus s = subset(c, 3, 7);
  REQUIRE(s.size() == 3);
  CHECK(s.items[0].id == "Mercury_7006");
  CHECK(s.items[1].id == "Mercury_7008");
  CHECK(s.items[2].id == "Mercury_7009");

  Corpus s5 = subset(c, 5, 2024);
  std::vector<std::string> ids;
  for (const auto& q : s5.items) ids.push_back(q.id);
  CHECK(ids == std::vector<std::string>{"Mercury_7004", "Mercury_7005", "Mercury_7006", "Mercury_7008",
                                        "Mercury_7009"});
}

TEST_CASE("subset is deterministic and order preserving") {
  Corpus c = load_corpus(data_dir() / "arc_fixture_en.jsonl", Language::en);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    for (std::size_t n : {1u, 4u, 9u, 10u, 25u}) {
      Corpus a = subset(c, n, seed);
      CHECK(a == subset(c, n, seed));
      CHECK(a.size() == std::min<std::size_t>(n, c.size()));
      std::size_t last = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        auto it = std::find(c.items.begin(), c.items.end(), a.items[i]);
        REQUIRE(it != c.items.end());
        auto pos = static_cast<std::size_t>(it - c.items.begin());
        if (i > 0) CHECK(pos > last);
        last = pos;
      }
    }
  }
  CHECK_THROWS_AS(subset(c, 0, 1), std::invalid_argument);
}
