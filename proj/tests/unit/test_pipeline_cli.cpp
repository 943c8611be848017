#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

#include "../support.hpp"
#include "suffbench/error.hpp"
#include "suffbench/pipeline.hpp"
#include "suffbench/report.hpp"

using namespace suffbench;
namespace st = suffbench::testing;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args, const fs::path& log) {
  std::string cmd = std::string(SUFFBENCH_CLI) + " --log-level warn " + args + " > '" + log.string() + "' 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

fs::path write_config(const fs::path& dir, const nlohmann::json& j, const std::string& name = "config.json") {
  fs::path p = dir / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

RunConfig small_config(const fs::path& store, std::size_t sample = 3) {
  auto j = st::mock_config(store);
  j["sample"] = sample;
  return parse_config(j, store.parent_path());
}

std::size_t count_lines(const fs::path& p) {
  std::string s = st::slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("config validation") {
  st::TempDir dir;
  auto j = st::mock_config(dir / "store");
  CHECK_NOTHROW(parse_config(j, dir.path()));

  auto bad = j;
  bad["colour"] = "blue";
  CHECK_THROWS_AS(parse_config(bad, dir.path()), ConfigError);
  bad = j;
  bad["scorer"]["temperature"] = 0;
  CHECK_THROWS_AS(parse_config(bad, dir.path()), ConfigError);
  bad = j;
  bad["levels"] = {10, 20};
  CHECK_THROWS_AS(parse_config(bad, dir.path()), ConfigError);
  bad = j;
  bad["levels"] = {0, 15};
  CHECK_THROWS_AS(parse_config(bad, dir.path()), ConfigError);
  bad = j;
  bad["generators"][1]["model_id"] = "mock-gen-a";
  CHECK_THROWS_AS(parse_config(bad, dir.path()), ConfigError);
  bad = j;
  bad["generators"][0]["model_id"] = "baseline";
  CHECK_THROWS_AS(parse_config(bad, dir.path()), ConfigError);
  bad = j;
  bad["generators"][0]["requests_per_minute"] = 0;
  CHECK_THROWS_AS(parse_config(bad, dir.path()), ConfigError);
  bad = j;
  bad["corpora"][1]["language"] = "en";
  CHECK_THROWS_AS(parse_config(bad, dir.path()), ConfigError);

  auto rel = j;
  rel["store"] = "runs/x";
  CHECK(parse_config(rel, dir.path()).store == dir / "runs/x");
}

TEST_CASE("run id is derived from the manifest identity") {
  st::TempDir dir;
  auto a = prepare_run(small_config(dir / "a"));
  auto b = prepare_run(small_config(dir / "b"));
  CHECK(a.manifest.run_id == b.manifest.run_id);
  CHECK(a.manifest.run_id.starts_with("run-"));
  CHECK(a.corpora[0].size() == 3);
  auto c = prepare_run(small_config(dir / "c", 4));
  CHECK(c.manifest.run_id != a.manifest.run_id);
}

TEST_CASE("stages run in order") {
  st::TempDir dir;
  gateway::Gateway gw;
  Pipeline p(prepare_run(small_config(dir / "store")), gw);
  CHECK_THROWS_AS(p.run_stage(Stage::score), StageOrderError);
  CHECK_THROWS_AS(p.run_stage(Stage::constrain), StageOrderError);
  CHECK(p.run_stage(Stage::generate).completed == 12);  // 3 items x 2 models x 2 languages
  CHECK(p.stage_complete(Stage::generate));
  CHECK_THROWS_AS(p.run_stage(Stage::mask), StageOrderError);
  CHECK(p.run_stage(Stage::generate).pending == 0);
  CHECK(gw.stats().generate_calls == 12);
}

TEST_CASE("dry run sends nothing") {
  st::TempDir dir;
  auto inputs = prepare_run(small_config(dir / "store"));
  std::ostringstream out;
  auto summary = dry_run(inputs, out);
  CHECK(summary.prompts == 12 + 6);  // generation prompts plus one baseline per item
  CHECK(summary.deferred == 12 * 19);
  CHECK(!fs::exists(dir / "store"));
  std::istringstream lines(out.str());
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    auto j = nlohmann::json::parse(line);
    CHECK(j.contains("text"));
    ++n;
  }
  CHECK(n == summary.prompts);

  // With level-0 output stored, every constrain prompt and budget renders.
  gateway::Gateway gw;
  Pipeline p(inputs, gw);
  p.run_stage(Stage::generate);
  std::ostringstream out2;
  auto s2 = dry_run(inputs, out2);
  CHECK(s2.prompts == 12 + 6 + 12 * 10);
  CHECK(s2.deferred == 12 * 9);
  CHECK(out2.str().find("\"word_budget\"") != std::string::npos);
}

TEST_CASE("full small run and reports") {
  st::TempDir dir;
  gateway::Gateway gw;
  Pipeline p(prepare_run(small_config(dir / "store")), gw);
  auto summaries = p.run_all();
  CHECK(summaries.size() == 6);
  for (Stage s : kStages) CHECK(p.stage_complete(s));
  CHECK(p.store().scores().size() == 2 * (3 * 2 * 10 + 3));
  CHECK(p.store().similarities().size() == 2 * 3 * 2 * 9);
  CHECK(p.store().aggregates().size() == 2 * (2 * 10 + 1));

  auto files = write_report(p.store(), ReportKind::tables);
  CHECK(files.size() == 4);
  CHECK(count_lines(dir / "store/reports/table2_full_explanation.csv") == 1 + 2);
  CHECK(count_lines(dir / "store/reports/table1_baseline.csv") == 1 + 2);
  write_report(p.store(), ReportKind::curves);
  CHECK(count_lines(dir / "store/reports/curves_mock-gen-a.csv") == 1 + 2 * 11);
  write_report(p.store(), ReportKind::heatmap);
  CHECK(fs::exists(dir / "store/reports/heatmap_fa.svg"));
  CHECK(count_lines(dir / "store/reports/heatmap_en.csv") == 1 + 2);
}

TEST_CASE("report needs aggregates") {
  st::TempDir dir;
  gateway::Gateway gw;
  Pipeline p(prepare_run(small_config(dir / "store")), gw);
  CHECK_THROWS_AS(write_report(p.store(), ReportKind::tables), StoreError);
}

TEST_CASE("percent formatting and svg cells") {
  CHECK(format_percent(0.71172) == "71.17");
  CHECK(format_percent(1.0) == "100.00");
  HeatmapMatrix m;
  m.models = {"m"};
  m.levels = {10, 20};
  m.values = {{1.0, std::nullopt}};
  auto svg = render_heatmap_svg(m, "t");
  CHECK(svg.find("data-value=\"1\"") != std::string::npos);
  CHECK(svg.find("data-missing=\"true\"") != std::string::npos);
  CHECK(svg.find("rgb(0,0,0)") != std::string::npos);
}

TEST_CASE("cli exit codes") {
  st::TempDir dir;
  auto j = st::mock_config(dir / "store");
  j["sample"] = 2;
  auto cfg = write_config(dir.path(), j);
  auto log = dir / "log.txt";

  CHECK(run_cli("validate-config " + cfg.string(), log) == 0);
  CHECK(st::slurp(log).find("ok: run") != std::string::npos);

  auto bad = j;
  bad["unknown_key"] = 1;
  CHECK(run_cli("validate-config " + write_config(dir.path(), bad, "bad.json").string(), log) == 2);
  CHECK(run_cli("validate-config " + (dir / "missing.json").string(), log) == 2);
  auto nocorpus = j;
  nocorpus["corpora"][0]["path"] = (dir / "nope.jsonl").string();
  CHECK(run_cli("validate-config " + write_config(dir.path(), nocorpus, "nc.json").string(), log) == 2);
  CHECK(run_cli("run", log) == 2);
  CHECK(run_cli("run --config " + cfg.string() + " --stage bogus", log) == 2);

  CHECK(run_cli("run --config " + cfg.string() + " --stage score", log) == 3);
  CHECK(st::slurp(log).find("stage order") != std::string::npos);

  CHECK(run_cli("run --config " + cfg.string() + " --dry-run", log) == 0);
  CHECK(st::slurp(log).find("\"kind\":\"generate\"") != std::string::npos);

  CHECK(run_cli("report --store " + (dir / "store").string() + " --kind tables", log) == 3);
  CHECK(run_cli("run --config " + cfg.string() + " --all", log) == 0);
  CHECK(st::slurp(log).find("requests:") == std::string::npos);  // info is below warn
  CHECK(run_cli("run --config " + cfg.string() + " --all", log) == 0);

  auto changed = j;
  changed["scorer"]["base_url"] = "mock://8?logprobs=hash";
  CHECK(run_cli("run --config " + write_config(dir.path(), changed, "changed.json").string() + " --all", log) == 4);

  for (const char* kind : {"tables", "heatmap", "curves"}) {
    CHECK(run_cli("report --store " + (dir / "store").string() + " --kind " + kind, log) == 0);
  }
  CHECK(run_cli("report --store " + (dir / "store").string() + " --kind pie", log) == 2);
}
