#pragma once
// Subcommand implementations behind the chronoplay CLI. Each command reads
// and writes files only; exit-code mapping lives in main.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chronoplay/config.hpp"

namespace chronoplay::cli {

struct CommonOptions {
  std::filesystem::path config_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> assets;
  std::optional<int> jobs;
  bool force = false;
};

// File config (when given) merged with flag overrides; the default seed is 7
// so deterministic runs work out of the box.
RunConfig resolve_config(const CommonOptions& common);

void cmd_ingest(const CommonOptions& common, const std::filesystem::path& in_dir,
                const std::filesystem::path& out_file,
                std::optional<std::size_t> max_chars,
                std::optional<std::size_t> overlap, const std::string& ner_mode,
                const std::filesystem::path& gazetteer);

void cmd_mine(const CommonOptions& common, const std::filesystem::path& posts_file,
              const std::filesystem::path& out_dir,
              const std::filesystem::path& deny_file,
              const std::filesystem::path& allow_file);

void cmd_synth(const CommonOptions& common, const std::filesystem::path& kb_file,
               const std::filesystem::path& templates_file,
               const std::filesystem::path& personas_file,
               const std::filesystem::path& store_dir, std::size_t n,
               const std::string& topic, const std::string& ablation,
               const std::string& phase_start, const std::string& game_id);

void cmd_drift(const CommonOptions& common, const std::filesystem::path& posts_file,
               const std::string& from, const std::string& to,
               const std::string& window, const std::string& step,
               std::optional<double> gamma, std::optional<double> lambda,
               std::optional<std::size_t> min_posts,
               const std::filesystem::path& out_file, bool phases_only);

void cmd_update(const CommonOptions& common, const std::filesystem::path& store_dir,
                const std::filesystem::path& events_file, const std::string& mode,
                const std::string& game_id);

void cmd_eval(const CommonOptions& common, const std::filesystem::path& slice_dir,
              const std::string& retriever, const std::string& ks,
              const std::filesystem::path& out_file);

void cmd_judge(const CommonOptions& common, const std::filesystem::path& slice_dir,
               const std::string& retriever, std::size_t k, const std::string& criteria,
               const std::filesystem::path& out_file);

void cmd_agreement(const std::filesystem::path& llm_file,
                   const std::filesystem::path& human_file,
                   const std::filesystem::path& selections_file,
                   const std::filesystem::path& out_file);

void cmd_report(const CommonOptions& common, const std::filesystem::path& store_dir,
                const std::filesystem::path& out_file,
                const std::filesystem::path& csv_file);

}  // namespace chronoplay::cli
