// chronoplay: generate, evolve, and score a dynamic player-centric RAG
// benchmark from the command line. Every subcommand reads and writes files;
// there is no interactive mode.

#include <iostream>

#include "CLI11.hpp"

#include "commands.hpp"

namespace {

constexpr int kUsageError = 64;

}  // namespace

int main(int argc, char** argv) {
  using namespace chronoplay;
  using namespace chronoplay::cli;

  CLI::App app{"chronoplay: dynamic gaming RAG benchmark engine"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string seed_str;
  std::string assets;
  int jobs = 0;
  app.add_option("--config", common.config_file, "run configuration file")
      ->configurable(false);
  app.add_option("--seed", seed_str, "run seed (default 7)");
  app.add_option("--assets", assets, "assets directory override");
  app.add_option("--jobs", jobs, "parallelism bound for evaluation");
  app.add_flag("--force", common.force, "overwrite existing outputs");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "chunk raw documents into snippets");
  std::filesystem::path in_dir, out_file, gazetteer;
  std::size_t max_chars = 0, overlap = std::string::npos;
  std::string ner_mode = "none";
  ingest->add_option("--in", in_dir, "directory of RawDocument .jsonl files")->required();
  ingest->add_option("--out", out_file, "output snippets.jsonl")->required();
  std::optional<std::size_t> max_chars_opt, overlap_opt;
  ingest->add_option_function<std::size_t>(
      "--max-chars", [&](std::size_t v) { max_chars_opt = v; }, "chunk size in chars");
  ingest->add_option_function<std::size_t>(
      "--overlap", [&](std::size_t v) { overlap_opt = v; }, "chunk overlap in chars");
  ingest->add_option("--ner", ner_mode, "entity extraction: none|llm|dictionary")
      ->check(CLI::IsMember({"none", "llm", "dictionary"}));
  ingest->add_option("--gazetteer", gazetteer, "gazetteer file for dictionary NER");

  // mine
  auto* mine = app.add_subcommand("mine", "mine templates and personas from posts");
  std::filesystem::path posts_file, out_dir, deny_file, allow_file;
  mine->add_option("--posts", posts_file, "community posts .jsonl")->required();
  mine->add_option("--out-dir", out_dir, "output directory")->required();
  mine->add_option("--deny", deny_file, "expert deny list (ids, one per line)");
  mine->add_option("--allow", allow_file, "expert allow list (ids, one per line)");

  // synth
  auto* synth = app.add_subcommand("synth", "synthesize the initial benchmark slice");
  std::filesystem::path kb_file, templates_file, personas_file, store_dir;
  std::size_t n_tuples = 50;
  std::string topic, ablation, phase_start, game_id;
  synth->add_option("--kb", kb_file, "snippets.jsonl knowledge base")->required();
  synth->add_option("--templates", templates_file, "templates.jsonl")->required();
  synth->add_option("--personas", personas_file, "personas.jsonl");
  synth->add_option("--store", store_dir, "benchmark store directory")->required();
  synth->add_option("--n", n_tuples, "number of tuples");
  synth->add_option("--topic", topic, "restrict to one MAIN/SUB topic");
  synth->add_option("--ablation", ablation, "no-hypo,no-persona,no-template");
  synth->add_option("--phase-start", phase_start, "phase start (epoch or YYYY-MM-DD)");
  synth->add_option("--game", game_id, "game id");

  // drift / phases
  auto* drift = app.add_subcommand("drift", "windowed drift reports over posts");
  auto* phases = app.add_subcommand("phases", "partition a timeline into phases");
  std::filesystem::path drift_posts, drift_out;
  std::string from_str, to_str, window_str, step_str;
  std::optional<double> gamma_opt, lambda_opt;
  std::optional<std::size_t> min_posts_opt;
  for (auto* cmd : {drift, phases}) {
    cmd->add_option("--posts", drift_posts, "classified posts .jsonl")->required();
    cmd->add_option("--from", from_str, "timeline start")->required();
    cmd->add_option("--to", to_str, "timeline end")->required();
    cmd->add_option("--window", window_str, "window W, e.g. 5d, 2mo");
    cmd->add_option("--step", step_str, "step, e.g. 1d");
    cmd->add_option_function<double>(
        "--gamma", [&](double v) { gamma_opt = v; }, "topic importance factor");
    cmd->add_option_function<double>(
        "--lambda", [&](double v) { lambda_opt = v; }, "drift threshold");
    cmd->add_option_function<std::size_t>(
        "--min-posts", [&](std::size_t v) { min_posts_opt = v; }, "low-sample guard");
    cmd->add_option("--out", drift_out, "output JSON")->required();
  }

  // update
  auto* update = app.add_subcommand("update", "apply one lifecycle step");
  std::filesystem::path update_store, events_file;
  std::string mode = "dual", update_game;
  update->add_option("--store", update_store, "benchmark store directory")->required();
  update->add_option("--events", events_file, "events .jsonl")->required();
  update->add_option("--mode", mode, "dual|knowledge-only|interest-only")
      ->check(CLI::IsMember({"dual", "knowledge-only", "interest-only"}));
  update->add_option("--game", update_game, "game id");

  // eval
  auto* eval = app.add_subcommand("eval", "retrieval metrics over a slice");
  std::filesystem::path eval_slice, eval_out;
  std::string retriever = "bm25", ks = "3";
  eval->add_option("--slice", eval_slice, "slice directory (store/slices/NNN)")
      ->required();
  eval->add_option("--retriever", retriever, "bm25|dense")
      ->check(CLI::IsMember({"bm25", "dense"}));
  eval->add_option("--k", ks, "comma-separated cutoffs, e.g. 1,3,5");
  eval->add_option("--out", eval_out, "output JSON")->required();

  // judge
  auto* judge = app.add_subcommand("judge", "generation scoring over a slice");
  std::filesystem::path judge_slice, judge_out;
  std::string judge_retriever = "dense", criteria = "correctness,faithfulness";
  std::size_t judge_k = 3;
  judge->add_option("--slice", judge_slice, "slice directory")->required();
  judge->add_option("--retriever", judge_retriever, "bm25|dense")
      ->check(CLI::IsMember({"bm25", "dense"}));
  judge->add_option("--k", judge_k, "context cutoff (default 3)");
  judge->add_option("--criteria", criteria, "correctness,faithfulness");
  judge->add_option("--out", judge_out, "output JSON")->required();

  // agreement
  auto* agreement = app.add_subcommand("agreement", "judge vs human agreement stats");
  std::filesystem::path llm_file, human_file, selections_file, agreement_out;
  agreement->add_option("--llm", llm_file, "judge verdicts .jsonl ({id, raw})");
  agreement->add_option("--human", human_file, "human votes .jsonl ({id, votes})");
  agreement->add_option("--selections", selections_file,
                        "forced-choice selections .jsonl ({id, choice})");
  agreement->add_option("--out", agreement_out, "output JSON")->required();

  // report
  auto* report = app.add_subcommand("report", "consolidated store report");
  std::filesystem::path report_store, report_out, report_csv;
  report->add_option("--store", report_store, "benchmark store directory")->required();
  report->add_option("--out", report_out, "output JSON")->required();
  report->add_option("--csv", report_csv, "optional CSV flattening");

  // Global options (--config, --seed, ...) may appear after the subcommand.
  for (auto* sub : {ingest, mine, synth, drift, phases, update, eval, judge, agreement,
                    report}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kUsageError;
  }

  if (!seed_str.empty()) common.seed = std::stoull(seed_str);
  if (!assets.empty()) common.assets = assets;
  if (jobs > 0) common.jobs = jobs;

  try {
    if (app.got_subcommand(ingest)) {
      cmd_ingest(common, in_dir, out_file, max_chars_opt, overlap_opt, ner_mode,
                 gazetteer);
    } else if (app.got_subcommand(mine)) {
      cmd_mine(common, posts_file, out_dir, deny_file, allow_file);
    } else if (app.got_subcommand(synth)) {
      cmd_synth(common, kb_file, templates_file, personas_file, store_dir, n_tuples,
                topic, ablation, phase_start, game_id);
    } else if (app.got_subcommand(drift)) {
      cmd_drift(common, drift_posts, from_str, to_str, window_str, step_str, gamma_opt,
                lambda_opt, min_posts_opt, drift_out, /*phases_only=*/false);
    } else if (app.got_subcommand(phases)) {
      cmd_drift(common, drift_posts, from_str, to_str, window_str, step_str, gamma_opt,
                lambda_opt, min_posts_opt, drift_out, /*phases_only=*/true);
    } else if (app.got_subcommand(update)) {
      cmd_update(common, update_store, events_file, mode, update_game);
    } else if (app.got_subcommand(eval)) {
      cmd_eval(common, eval_slice, retriever, ks, eval_out);
    } else if (app.got_subcommand(judge)) {
      cmd_judge(common, judge_slice, judge_retriever, judge_k, criteria, judge_out);
    } else if (app.got_subcommand(agreement)) {
      cmd_agreement(llm_file, human_file, selections_file, agreement_out);
    } else if (app.got_subcommand(report)) {
      cmd_report(common, report_store, report_out, report_csv);
    }
  } catch (const Error& e) {
    std::cerr << "error (" << error_kind_name(e.kind()) << "): " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
