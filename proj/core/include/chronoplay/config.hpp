#pragma once
// Run configuration: one sectioned key/value file checked into the run
// directory for provenance; CLI flags override file values.

#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include "chronoplay/community.hpp"
#include "chronoplay/drift.hpp"
#include "chronoplay/entity.hpp"
#include "chronoplay/ingest.hpp"
#include "chronoplay/providers.hpp"
#include "chronoplay/rag_eval.hpp"
#include "chronoplay/synthesis.hpp"

namespace chronoplay {

enum class ProviderKind { mock, remote };

struct RunConfig {
  std::string game_id = "game";
  std::uint64_t seed = 0;
  bool deterministic = true;
  int jobs = 1;

  ProviderKind completion_provider = ProviderKind::mock;
  ProviderKind embedding_provider = ProviderKind::mock;
  std::size_t embed_dim = 64;
  std::string llm_model = "default-model";
  std::string embed_model = "default-embed";
  int provider_max_attempts = 3;
  int provider_backoff_ms = 500;

  DriftConfig drift;
  SynthesisConfig synthesis;
  Bm25Params bm25;
  ChunkPolicy chunks;

  double dedup_threshold = kDefaultDedupThreshold;
  double persona_confidence_floor = 0.5;
  int ner_pseudo_examples = 3;
  ExtractorKind ner_extractor = ExtractorKind::llm_self_icl;
  std::filesystem::path gazetteer;  // required for the dictionary extractor

  // Evaluation queries are the tuple question alone unless this is set, in
  // which case the matched persona description is prepended.
  bool eval_prepend_persona = false;

  std::filesystem::path assets_dir;  // defaults to default_assets_dir()

  std::filesystem::path taxonomy_file() const { return assets_dir / "taxonomy.json"; }
  std::filesystem::path prompts_dir() const { return assets_dir / "prompts"; }

  // Checks referenced assets exist and deterministic runs carry a seed.
  void validate() const;
};

// Sectioned key=value text ("[drift]\nwindow = 5d"). Unknown keys are a
// config error so typos surface; '#' starts a comment.
RunConfig load_config(const std::filesystem::path& file);
RunConfig default_config();

struct ProviderSet {
  std::unique_ptr<CompletionProvider> completion;
  std::unique_ptr<EmbeddingProvider> embedding;
};

// Builds providers per the config; remote endpoints and keys come from
// CHRONO_LLM_ENDPOINT / CHRONO_LLM_KEY / CHRONO_EMBED_ENDPOINT /
// CHRONO_EMBED_KEY.
ProviderSet make_providers(const RunConfig& config);

}  // namespace chronoplay
