#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>

#include "support/pipeline.hpp"

using namespace chronoplay;
using pipeline::run_cli;

TEST_CASE("help exits 0, usage errors exit 64") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("drift --help").exit_code == 0);
  CHECK(run_cli("bogus-subcommand").exit_code == 64);
  CHECK(run_cli("drift --no-such-flag").exit_code == 64);
  CHECK(run_cli("").exit_code == 64);  // a subcommand is required
}

TEST_CASE("missing assets fail with exit 1 and a named path") {
  fixtures::TempDir dir;
  fixtures::write_file(dir.path() / "posts.jsonl", "");
  auto result = run_cli("drift --assets /nonexistent-assets --posts " +
                        (dir.path() / "posts.jsonl").string() +
                        " --from 0 --to 100 --out " + (dir.path() / "out.json").string());
  CHECK(result.exit_code == 1);
  CHECK(result.output.find("/nonexistent-assets") != std::string::npos);
}

TEST_CASE("ingest chunks documents and is idempotent without --force") {
  fixtures::TempDir dir;
  pipeline::write_jsonl_rows(dir.path() / "docs" / "a.jsonl",
                             {pipeline::wiki_doc("docA", "alpha body text"),
                              pipeline::wiki_doc("docB", "beta body text")});
  const std::string out = (dir.path() / "snippets.jsonl").string();
  auto first = run_cli("ingest --in " + (dir.path() / "docs").string() + " --out " + out);
  CHECK(first.exit_code == 0);
  CHECK(read_jsonl(out).size() == 2);

  auto again = run_cli("ingest --in " + (dir.path() / "docs").string() + " --out " + out);
  CHECK(again.exit_code == 0);
  CHECK(again.output.find("skipping") != std::string::npos);

  // An official update without a resolvable date is a validation failure.
  pipeline::write_jsonl_rows(
      dir.path() / "bad" / "b.jsonl",
      {nlohmann::json{{"doc_id", "upd"},
                      {"title", "u"},
                      {"body", "no dates in this body"},
                      {"source_kind", "official_update"},
                      {"game_id", "g"}}});
  auto bad = run_cli("ingest --in " + (dir.path() / "bad").string() + " --out " +
                     (dir.path() / "bad.jsonl").string());
  CHECK(bad.exit_code == 1);
}

TEST_CASE("drift finds the two-regime boundary from the command line") {
  fixtures::TempDir dir;
  std::vector<nlohmann::json> posts;
  for (int d = 0; d <= 29; ++d) {
    posts.push_back(nlohmann::json{{"post_id", "a" + std::to_string(d)},
                                   {"text", "x"},
                                   {"created_at", d * kSecondsPerDay},
                                   {"topic", "GAME_CONTENT/PROGRESS_GUIDE"}});
  }
  for (int d = 30; d <= 59; ++d) {
    posts.push_back(nlohmann::json{{"post_id", "b" + std::to_string(d)},
                                   {"text", "x"},
                                   {"created_at", d * kSecondsPerDay},
                                   {"topic", "AFTER_SALES_SERVICE/REFUND_POLICY"}});
  }
  pipeline::write_jsonl_rows(dir.path() / "posts.jsonl", posts);
  const std::string out = (dir.path() / "drift.json").string();
  auto result = run_cli("drift --posts " + (dir.path() / "posts.jsonl").string() +
                        " --from 0 --to " + std::to_string(59 * kSecondsPerDay) +
                        " --window 5d --step 1d --gamma 1.5 --lambda 0.001"
                        " --min-posts 1 --out " + out);
  REQUIRE(result.exit_code == 0);
  std::ifstream in(out);
  nlohmann::json j;
  in >> j;
  REQUIRE(j["boundaries"].size() == 1);
  const Instant boundary = j["boundaries"][0].get<Instant>();
  CHECK(boundary >= 30 * kSecondsPerDay);
  CHECK(boundary <= 36 * kSecondsPerDay);
  CHECK(j["phases"].size() == 2);
  CHECK(!j["steps"].empty());
}

TEST_CASE("agreement command reproduces the worked table") {
  fixtures::TempDir dir;
  pipeline::write_jsonl_rows(dir.path() / "llm.jsonl",
                             {nlohmann::json{{"id", "1"}, {"raw", 2}},
                              nlohmann::json{{"id", "2"}, {"raw", 1}},
                              nlohmann::json{{"id", "3"}, {"raw", 0}},
                              nlohmann::json{{"id", "4"}, {"raw", 2}}});
  pipeline::write_jsonl_rows(
      dir.path() / "human.jsonl",
      {nlohmann::json{{"id", "1"}, {"votes", std::vector<int>{1, 1, 1}}},
       nlohmann::json{{"id", "2"}, {"votes", std::vector<int>{0, 0, 1}}},
       nlohmann::json{{"id", "3"}, {"votes", std::vector<int>{0, 0, 0}}},
       nlohmann::json{{"id", "4"}, {"votes", std::vector<int>{1, 1, 0}}}});
  const std::string out = (dir.path() / "agreement.json").string();
  auto result = run_cli("agreement --llm " + (dir.path() / "llm.jsonl").string() +
                        " --human " + (dir.path() / "human.jsonl").string() + " --out " +
                        out);
  REQUIRE(result.exit_code == 0);
  std::ifstream in(out);
  nlohmann::json j;
  in >> j;
  CHECK(j["agreement"]["accuracy"].get<double>() == doctest::Approx(0.75));
  CHECK(j["agreement"]["recall"].get<double>() == doctest::Approx(1.0));
  CHECK(j.contains("krippendorff_alpha"));

  // Forced-choice selections flow through the same subcommand.
  pipeline::write_jsonl_rows(dir.path() / "sel.jsonl",
                             {nlohmann::json{{"id", "a"}, {"choice", "full"}},
                              nlohmann::json{{"id", "b"}, {"choice", "full"}},
                              nlohmann::json{{"id", "c"}, {"choice", "no_template"}},
                              nlohmann::json{{"id", "d"}, {"choice", "no_persona"}}});
  const std::string out2 = (dir.path() / "rates.json").string();
  auto rates = run_cli("agreement --selections " + (dir.path() / "sel.jsonl").string() +
                       " --out " + out2);
  REQUIRE(rates.exit_code == 0);
  std::ifstream in2(out2);
  nlohmann::json r;
  in2 >> r;
  CHECK(r["win_rates"]["full"].get<double>() == doctest::Approx(0.5));
}

TEST_CASE("full mock pipeline runs end to end") {
  fixtures::TempDir dir;
  auto paths = pipeline::write_e2e_fixture(dir.path());
  const std::string failure = pipeline::run_pipeline(paths, "dual");
  REQUIRE_MESSAGE(failure.empty(), failure);

  for (int i = 0; i <= 3; ++i) {
    CHECK(std::filesystem::exists(paths.store / "slices" /
                                  (std::string("00") + std::to_string(i)) /
                                  "manifest.json"));
  }
  CHECK(std::filesystem::exists(paths.store / "report_all.json"));
  CHECK(std::filesystem::exists(paths.store / "report_all.csv"));

  std::ifstream in(paths.store / "report_all.json");
  nlohmann::json report;
  in >> report;
  REQUIRE(report["slices"].size() == 4);
  for (const auto& slice : report["slices"]) {
    const auto& fractions = slice["composition"]["fractions"];
    const double sum = fractions["inherited"].get<double>() +
                       fractions["knowledge_update"].get<double>() +
                       fractions["interest_update"].get<double>();
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}
