#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "../support.hpp"
#include "suffbench/error.hpp"
#include "suffbench/metrics.hpp"

using namespace suffbench;

namespace {

ScoreResult score(const std::string& item, const std::string& model, Level level, double suff, bool correct,
                  Language lang = Language::en, const std::string& run = "r1") {
  ScoreResult s;
  s.run_id = run;
  s.item_id = item;
  s.language = lang;
  s.generator_model = model;
  s.level = level;
  s.sufficiency = suff;
  s.correct = correct;
  return s;
}

SimilarityRecord sim(const std::string& item, const std::string& model, int level, double c,
                     Language lang = Language::en) {
  SimilarityRecord r;
  r.run_id = "r1";
  r.item_id = item;
  r.language = lang;
  r.generator_model = model;
  r.level = Level(level);
  r.cosine = c;
  return r;
}

const AggregateCell& cell_of(const std::vector<AggregateCell>& cells, const std::string& model, Level level,
                             Language lang = Language::en) {
  auto it = std::find_if(cells.begin(), cells.end(), [&](const AggregateCell& c) {
    return c.generator_model == model && c.level == level && c.language == lang;
  });
  REQUIRE(it != cells.end());
  return *it;
}

}  // namespace

TEST_CASE("cosine examples") {
  std::vector<double> x{0.3, -1.2, 4.0};
  CHECK(cosine(x, x) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cosine(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 0.0);
  // 32 / (sqrt(14) * sqrt(77)), oracle value
  CHECK(std::abs(cosine(std::vector<double>{1, 2, 3}, std::vector<double>{4, 5, 6}) - 0.97463184619707627108) < 1e-12);
  CHECK(cosine(std::vector<double>{1, 1}, std::vector<double>{-2, -2}) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(cosine(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), DimensionMismatch);
  CHECK_THROWS_AS(cosine(std::vector<double>{0, 0}, std::vector<double>{1, 2}), std::invalid_argument);
}

TEST_CASE("cosine stays in range") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> d;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> a(16), b(16);
    for (auto& v : a) v = d(rng);
    for (auto& v : b) v = d(rng);
    double c = cosine(a, b);
    CHECK(c >= -1.0);
    CHECK(c <= 1.0);
    CHECK(c == doctest::Approx(cosine(b, a)).epsilon(1e-14));
  }
}

TEST_CASE("conciseness and realized reduction") {
  CHECK(conciseness(Level(0)) == 0.0);
  CHECK(conciseness(Level(20)) == 0.2);
  CHECK(conciseness(Level(50)) == 0.5);
  CHECK(realized_reduction(50, 40) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(realized_reduction(30, 12) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK_THROWS(realized_reduction(0, 1));
}

TEST_CASE("aggregate cells") {
  std::vector<ScoreResult> scores{
      score("i1", "m", Level(0), 0.5, true),   score("i2", "m", Level(0), 0.25, false),
      score("i1", "m", Level(10), 0.75, true), score("i2", "m", Level(10), 0.25, true),
      score("i1", kBaselineModel.data(), Level::noexp(), 0.5, false),
      score("i2", kBaselineModel.data(), Level::noexp(), 1.0, true),
  };
  std::vector<SimilarityRecord> sims{sim("i1", "m", 10, 0.5), sim("i2", "m", 10, 1.0)};
  auto cells = aggregate({scores, sims, {}}, "r1");
  REQUIRE(cells.size() == 3);
  auto z0 = cell_of(cells, "m", Level(0));
  CHECK(z0.accuracy == 0.5);
  CHECK(z0.mean_sufficiency == 0.375);
  CHECK(z0.n_items == 2);
  CHECK(!z0.mean_similarity);
  auto z10 = cell_of(cells, "m", Level(10));
  CHECK(z10.accuracy == 1.0);
  CHECK(z10.mean_sufficiency == 0.5);
  CHECK(z10.mean_similarity == 0.75);
  auto base = cell_of(cells, std::string(kBaselineModel), Level::noexp());
  CHECK(base.accuracy == 0.5);
  CHECK(base.mean_sufficiency == 0.75);
  CHECK(base.run_id == "r1");
}

TEST_CASE("gold favouring scorer propagates to every cell") {
  const double s = 0.97814840983149174934;  // oracle softmax of (-0.1, -5, -5, -5)
  std::vector<ScoreResult> scores;
  for (int i = 0; i < 10; ++i) {
    for (int v = 0; v <= 90; v += 10) scores.push_back(score("i" + std::to_string(i), "m", Level(v), s, true));
  }
  for (const auto& c : aggregate({scores, {}, {}}, "r1")) {
    CHECK(c.accuracy == 1.0);
    CHECK(std::abs(c.mean_sufficiency - s) < 1e-12);
  }
}

TEST_CASE("aggregate does not depend on record order") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ScoreResult> scores;
  std::vector<SimilarityRecord> sims;
  for (int i = 0; i < 40; ++i) {
    for (int v = 0; v <= 90; v += 10) {
      scores.push_back(score("i" + std::to_string(i), "m", Level(v), u(rng), u(rng) < 0.5));
      if (v > 0) sims.push_back(sim("i" + std::to_string(i), "m", v, u(rng)));
    }
  }
  auto expected = aggregate({scores, sims, {}}, "r1");
  for (int k = 0; k < 5; ++k) {
    std::shuffle(scores.begin(), scores.end(), rng);
    std::shuffle(sims.begin(), sims.end(), rng);
    CHECK(aggregate({scores, sims, {}}, "r1") == expected);
  }
}

TEST_CASE("unparseable base excludes the item for that model") {
  std::vector<ScoreResult> scores{score("i1", "m", Level(0), 1.0, true), score("i2", "m", Level(0), 0.0, false),
                                  score("i1", "m", Level(50), 1.0, true), score("i2", "m", Level(50), 0.0, false),
                                  score("i2", "n", Level(0), 0.0, false)};
  Explanation bad;
  bad.run_id = "r1";
  bad.item_id = "i2";
  bad.generator_model = "m";
  bad.parse_status = ParseStatus::unparseable;
  std::vector<Explanation> bases{bad};
  auto cells = aggregate({scores, {}, bases}, "r1");
  CHECK(cell_of(cells, "m", Level(0)).n_items == 1);
  CHECK(cell_of(cells, "m", Level(0)).accuracy == 1.0);
  CHECK(cell_of(cells, "m", Level(50)).n_excluded == 1);
  CHECK(cell_of(cells, "n", Level(0)).n_items == 1);
  CHECK(cell_of(cells, "n", Level(0)).n_excluded == 0);
}

TEST_CASE("mixed runs are refused") {
  std::vector<ScoreResult> scores{score("i1", "m", Level(0), 1.0, true),
                                  score("i2", "m", Level(0), 1.0, true, Language::en, "other")};
  CHECK_THROWS_AS(aggregate({scores, {}, {}}, "r1"), StoreError);
}

TEST_CASE("languages aggregate separately") {
  std::vector<ScoreResult> scores{score("i1", "m", Level(0), 1.0, true, Language::en),
                                  score("i1", "m", Level(0), 0.0, false, Language::fa)};
  auto cells = aggregate({scores, {}, {}}, "r1");
  CHECK(cells.size() == 2);
  CHECK(cell_of(cells, "m", Level(0), Language::fa).accuracy == 0.0);
}

TEST_CASE("heatmap matrix") {
  std::vector<SimilarityRecord> one{sim("i1", "m", 50, 0.8)};
  auto m = heatmap_matrix(one);
  REQUIRE(m.models == std::vector<std::string>{"m"});
  CHECK(m.levels.size() == 9);
  for (std::size_t j = 0; j < 9; ++j) {
    if (m.levels[j] == 50) CHECK(m.values[0][j] == 0.8);
    else CHECK(!m.values[0][j]);
  }

  // hand-averaged fixture: two models, three items
  std::vector<SimilarityRecord> recs{sim("i1", "a", 10, 0.5),  sim("i2", "a", 10, 1.0),  sim("i3", "a", 10, 0.75),
                                     sim("i1", "a", 90, 0.25), sim("i2", "a", 90, 0.5),  sim("i1", "b", 10, 1.0),
                                     sim("i1", "b", 10, 0.0, Language::fa)};
  auto h = heatmap_matrix(recs);
  REQUIRE(h.models == std::vector<std::string>{"a", "b"});
  CHECK(h.values[0][0] == 0.75);
  CHECK(h.values[0][8] == 0.375);
  CHECK(!h.values[0][4]);
  CHECK(h.values[1][0] == 0.5);
}
