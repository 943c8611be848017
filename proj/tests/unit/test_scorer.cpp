#include <doctest.h>

#include <cmath>
#include <random>

#include "../support.hpp"
#include "suffbench/masker.hpp"
#include "suffbench/scorer.hpp"

using namespace suffbench;
namespace st = suffbench::testing;

// Reference values from tests/oracles/softmax_cosine_oracle.py (50-digit mpmath).
TEST_CASE("softmax matches the high precision oracle") {
  auto p = option_distribution({-1, -2, -3, -4});
  CHECK(p[0] == doctest::Approx(0.64391425988797231176).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(0.2368828180899101323).epsilon(1e-12));
  CHECK(p[2] == doctest::Approx(0.087144318742032567489).epsilon(1e-12));
  CHECK(p[3] == doctest::Approx(0.032058603280084988451).epsilon(1e-12));
  auto g = option_distribution({-0.1, -5, -5, -5});
  CHECK(std::abs(g[0] - 0.97814840983149174934) < 1e-12);
}

TEST_CASE("symmetric logprobs give exact quarters") {
  auto p = option_distribution({-1, -1, -1, -1});
  for (double x : p) CHECK(x == 0.25);
  CHECK(argmax_label(p) == Label::A);
  CHECK(argmax_label({0.1, 0.4, 0.4, 0.1}) == Label::B);
  CHECK(argmax_label({0.1, 0.2, 0.3, 0.4}) == Label::D);
}

TEST_CASE("softmax invariants over random vectors") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> lp(-30.0, 0.0), shift(-50.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    OptionLogprobs v{lp(rng), lp(rng), lp(rng), lp(rng)};
    auto p = option_distribution(v);
    double c = shift(rng);
    auto q = option_distribution({v[0] + c, v[1] + c, v[2] + c, v[3] + c});
    double sum = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(std::abs(p[k] - q[k]) < 1e-9);
      CHECK(p[k] >= 0.0);
      sum += p[k];
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
    // raising one logprob never lowers its probability
    auto r = v;
    r[1] += 0.5;
    CHECK(option_distribution(r)[1] >= p[1]);
  }
}

TEST_CASE("extreme logprobs stay finite") {
  auto p = option_distribution({-1e9, -1, -2, -3});
  for (double x : p) CHECK(std::isfinite(x));
  CHECK(p[0] == 0.0);
  CHECK(p[1] + p[2] + p[3] == doctest::Approx(1.0));
}

namespace {

// Scorer that gives the gold label -0.1 and everything else -5.
std::shared_ptr<st::FunctionTransport> gold_scorer(Label gold) {
  return std::make_shared<st::FunctionTransport>([gold](std::string_view, const nlohmann::json& body) {
    std::string prompt = body.at("prompt");
    std::string cont = prompt.substr(prompt.size() - 2);
    return st::echo_reply(cont, cont[1] == to_char(gold) ? -0.1 : -5.0);
  });
}

}  // namespace

TEST_CASE("gold favouring scorer gives the oracle sufficiency") {
  auto q = st::make_item("q", "Which gas?", {"oxygen", "carbon dioxide", "nitrogen", "helium"}, Label::C);
  gateway::Gateway gw(st::options_with(gold_scorer(Label::C)));
  auto r = score_item(gw, st::endpoint("http://s.invalid/v1", "scorer"), q, std::nullopt,
                      st::repo_templates(Language::en));
  CHECK(std::abs(r.sufficiency - 0.97814840983149174934) < 1e-12);
  CHECK(r.correct);
  CHECK(r.predicted == Label::C);
  CHECK(r.level.is_noexp());
  CHECK(r.generator_model == kBaselineModel);
  CHECK(r.scorer_model == "scorer");
}

TEST_CASE("uniform mock scorer") {
  gateway::Gateway gw;
  auto ep = st::endpoint("mock://7?logprobs=uniform", "scorer");
  auto corpus = load_corpus(st::data_dir() / "arc_fixture_en.jsonl", Language::en);
  std::vector<ScoreResult> results;
  for (const auto& q : corpus.items) {
    Explanation e;
    e.item_id = q.id;
    e.generator_model = "g";
    e.level = Level(40);
    e.text = "Some reasoning about " + q.option(Label::B) + ".";
    auto [masked, report] = mask_explanation(e, q);
    results.push_back(score_item(gw, ep, q, masked, st::repo_templates(Language::en)));
    results.push_back(score_item(gw, ep, q, std::nullopt, st::repo_templates(Language::en)));
  }
  for (const auto& r : results) {
    CHECK(r.sufficiency == 0.25);
    CHECK(r.predicted == Label::A);
  }
  CHECK(mean_sufficiency(results) == 0.25);
  CHECK(results[0].level == Level(40));
  CHECK(results[0].prompt_fingerprint != results[1].prompt_fingerprint);
}

TEST_CASE("scoring rejects prompts without the suffix") {
  gateway::Gateway gw;
  RenderedPrompt p;
  p.kind = PromptKind::score;
  p.text = "no suffix";
  CHECK_THROWS_AS(option_logprobs(gw, st::endpoint("mock://1", "s"), p), std::invalid_argument);
  p.kind = PromptKind::generate;
  p.text = "x The answer is ";
  CHECK_THROWS_AS(option_logprobs(gw, st::endpoint("mock://1", "s"), p), std::invalid_argument);
}

TEST_CASE("mean sufficiency") {
  ScoreResult a, b;
  a.sufficiency = 0.5;
  b.sufficiency = 0.5;
  std::vector<ScoreResult> two{a, b};
  CHECK(mean_sufficiency(two) == 0.5);

  // hand sum: 2.5 + 2.0 + 0.5 = 5.0 over 10 results
  const double values[] = {0.25, 0.5, 0.75, 1.0, 0.125, 0.375, 0.625, 0.875, 0.0625, 0.4375};
  std::vector<ScoreResult> ten;
  for (double v : values) {
    ScoreResult r;
    r.sufficiency = v;
    ten.push_back(r);
  }
  CHECK(mean_sufficiency(ten) == 0.5);
  CHECK_THROWS_AS(mean_sufficiency(std::span<const ScoreResult>{}), std::invalid_argument);
}
