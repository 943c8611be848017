#include <doctest.h>

#include <random>

#include "../support.hpp"
#include "suffbench/constrainer.hpp"
#include "suffbench/error.hpp"

using namespace suffbench;
namespace st = suffbench::testing;

TEST_CASE("word counting") {
  CHECK(count_words("", Language::en) == 0);
  CHECK(count_words("   \n\t ", Language::en) == 0);
  CHECK(count_words("one", Language::en) == 1);
  CHECK(count_words("Plants absorb  sunlight.", Language::en) == 3);
  CHECK(count_words("by-product, well-known.", Language::en) == 2);
  CHECK(count_words("\xd9\x85\xdb\x8c\xe2\x80\x8c\xd8\xb1\xd9\x88\xd8\xaf \xd8\xa2\xd8\xa8", Language::fa) == 2);
  CHECK(count_words(st::slurp(st::data_dir() / "paragraph_50.txt"), Language::en) == 50);
}

TEST_CASE("truncation keeps the original bytes") {
  CHECK(truncate_words("a  b\nc d", 3) == "a  b\nc");
  CHECK(truncate_words("a b", 5) == "a b");
  CHECK(truncate_words("a b", 0).empty());
}

TEST_CASE("budget examples") {
  CHECK(word_budget(50, Level(20)) == 40);
  CHECK(word_budget(50, Level(50)) == 25);
  CHECK(word_budget(50, Level(90)) == 5);
  CHECK(word_budget(7, Level(90)) == 1);   // floor(0.7) clamps to 1
  CHECK(word_budget(1, Level(10)) == 1);
  CHECK(word_budget(33, Level(30)) == 23);  // floor(23.1)
  CHECK(word_budget(33, Level(10)) == 29);  // floor(29.7)
  CHECK_THROWS_AS(word_budget(50, Level(0)), std::invalid_argument);
  CHECK_THROWS_AS(word_budget(50, Level(15)), std::invalid_argument);
  CHECK_THROWS_AS(word_budget(50, Level::noexp()), std::invalid_argument);
}

TEST_CASE("budgets are monotone in level and within bounds") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> len(1, 2000);
  for (int i = 0; i < 500; ++i) {
    std::size_t w = len(rng);
    std::size_t prev = w;
    for (int v = 10; v <= 90; v += 10) {
      std::size_t b = word_budget(w, Level(v));
      CHECK(b >= 1);
      CHECK(b <= prev);
      CHECK(b <= std::max<std::size_t>(1, w));
      prev = b;
    }
  }
}

TEST_CASE("budget table") {
  Explanation base;
  base.item_id = "q";
  base.word_count = 50;
  auto t = compute_budgets(base);
  CHECK(t.budgets.size() == 9);
  CHECK(t.budget(Level(20)) == 40);
  CHECK_THROWS(t.budget(Level(0)));
  base.level = Level(10);
  CHECK_THROWS_AS(compute_budgets(base), std::invalid_argument);
  base.level = Level(0);
  base.word_count = 0;
  CHECK_THROWS_AS(compute_budgets(base), std::invalid_argument);
}

TEST_CASE("messy generator outputs") {
  auto cases = st::load_json(st::data_dir() / "messy_generations.json");
  for (const auto& c : cases) {
    std::string raw = c.at("raw");
    CAPTURE(raw);
    if (c.at("label").is_null()) {
      CHECK_THROWS_AS(extract_answer_and_explanation(raw), UnparseableOutput);
      continue;
    }
    auto parsed = extract_answer_and_explanation(raw);
    CHECK(to_char(parsed.label) == c.at("label").get<std::string>()[0]);
    CHECK(parsed.explanation == c.at("explanation").get<std::string>());
  }
  CHECK_THROWS_AS(extract_answer_and_explanation("Answer: E\nExplanation: x"), UnparseableOutput);
  CHECK_THROWS_AS(extract_answer_and_explanation("Answer: Because\nExplanation: x"), UnparseableOutput);
  CHECK_THROWS_AS(extract_answer_and_explanation("Answer: B\nExplanation:   "), UnparseableOutput);
  CHECK_THROWS_AS(extract_answer_and_explanation(""), UnparseableOutput);
}

namespace {

struct Replay {
  std::shared_ptr<std::vector<st::RecordedRequest>> log = std::make_shared<std::vector<st::RecordedRequest>>();
  std::unique_ptr<gateway::Gateway> gw;
  gateway::ModelEndpoint ep = st::endpoint("http://replay.invalid/v1", "replay-model");

  explicit Replay(std::deque<gateway::HttpResponse> replies) {
    gw = std::make_unique<gateway::Gateway>(
        st::options_with(std::make_shared<st::ScriptedTransport>(std::move(replies), log)));
  }
};

}  // namespace

TEST_CASE("constrain transcript replay") {
  auto tr = st::load_json(st::data_dir() / "constrain_transcript.json");
  auto q = st::make_item("Mercury_7001", "Which form of energy does a plant mainly use to make its food?",
                         {"sunlight", "heat from the soil", "sound", "wind"}, Label::A);
  Explanation base;
  base.item_id = q.id;
  base.generator_model = "replay-model";
  base.text = tr.at("base_explanation");
  base.word_count = count_words(base.text, Language::en);
  REQUIRE(base.word_count == tr.at("base_word_count").get<std::size_t>());

  std::deque<gateway::HttpResponse> replies;
  for (const auto& r : tr.at("responses")) replies.push_back(st::chat_reply(r));
  CHECK(count_words(extract_constrained_text(tr.at("responses")[0].get<std::string>()), Language::en) ==
        tr.at("expected_first_word_count").get<std::size_t>());

  Replay replay(replies);
  Level level(tr.at("level").get<int>());
  auto out = constrain_explanation(q, base, level, *replay.gw, replay.ep, st::repo_templates(Language::en));
  CHECK(out.word_count == tr.at("expected_word_count").get<std::size_t>());
  CHECK(out.attempts == tr.at("expected_attempts").get<int>());
  CHECK(out.length_status == LengthStatus::within_budget);
  CHECK(out.level == level);
  REQUIRE(replay.log->size() == 2);
  auto second = nlohmann::json::parse(replay.log->at(1).body);
  std::string prompt = second["messages"][0]["content"];
  CHECK(prompt.find("had 31 words") != std::string::npos);
  CHECK(prompt.find("at most 25 words") != std::string::npos);
}

TEST_CASE("over-budget after retries is truncated") {
  std::string hundred;
  for (int i = 0; i < 100; ++i) hundred += (i ? " w" : "w") + std::to_string(i);
  auto q = st::make_item("q", "S?", {"a1", "b1", "c1", "d1"}, Label::A);
  Explanation base;
  base.item_id = q.id;
  base.text = hundred;
  base.word_count = 100;
  std::deque<gateway::HttpResponse> replies(4, st::chat_reply("Answer: A\nExplanation: " + hundred));
  Replay replay(replies);
  auto out = constrain_explanation(q, base, Level(70), *replay.gw, replay.ep, st::repo_templates(Language::en));
  CHECK(out.attempts == 4);
  CHECK(out.length_status == LengthStatus::truncated);
  CHECK(out.word_count == 30);
  CHECK(out.text == truncate_words(hundred, 30));
  CHECK(replay.log->size() == 4);
}

TEST_CASE("base generation keeps unparseable output") {
  auto q = st::make_item("q", "S?", {"a1", "b1", "c1", "d1"}, Label::A);
  Replay replay({st::chat_reply("I think it is B."), st::chat_reply("Answer: C\nExplanation: three words here")});
  auto bad = generate_base_explanation(q, *replay.gw, replay.ep, st::repo_templates(Language::en));
  CHECK(bad.parse_status == ParseStatus::unparseable);
  CHECK(bad.text == "I think it is B.");
  CHECK(!bad.generator_label);
  auto good = generate_base_explanation(q, *replay.gw, replay.ep, st::repo_templates(Language::en));
  CHECK(good.parse_status == ParseStatus::ok);
  CHECK(good.generator_label == Label::C);
  CHECK(good.word_count == 3);
  CHECK(good.level == Level(0));
  CHECK(good.generator_model == "replay-model");
}
