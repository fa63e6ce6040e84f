#pragma once
// Community mining: classify posts against the taxonomy, extract question
// templates and user personas, deduplicate semantically.

#include <optional>
#include <string>
#include <vector>

#include "chronoplay/prompts.hpp"
#include "chronoplay/providers.hpp"
#include "chronoplay/taxonomy.hpp"

namespace chronoplay {

struct CommunityPost {
  std::string post_id;
  std::string text;
  Instant created_at = 0;
  std::string game_id;
  std::optional<TopicId> topic;  // filled by classification
};

struct QuestionTemplate {
  std::string template_id;
  std::string template_text;
  std::vector<std::string> placeholders;
  TopicId topic;
  std::string description;
};

struct Persona {
  std::string persona_id;
  std::string description;
  double confidence = 0.0;
};

CommunityPost post_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CommunityPost& p);
QuestionTemplate template_from_json(const nlohmann::json& j);
nlohmann::json to_json(const QuestionTemplate& t);
Persona persona_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Persona& p);

// Provider output is validated against the taxonomy; an invalid topic is
// retried once, then rejected with a classification error naming the post.
TopicId classify_topic(const CommunityPost& post, const Taxonomy& taxonomy,
                       CompletionProvider& provider, const PromptLibrary& prompts);

// 1-3 templates parsed from the provider JSON; placeholder consistency
// enforced; more than 3 returned templates are truncated to the first 3.
std::vector<QuestionTemplate> extract_templates(const CommunityPost& post,
                                                CompletionProvider& provider,
                                                const PromptLibrary& prompts);

// Absent when the provider returns a null description or the confidence is
// below the floor.
std::optional<Persona> extract_persona(const CommunityPost& post,
                                       CompletionProvider& provider,
                                       const PromptLibrary& prompts,
                                       double confidence_floor = 0.5);

// Greedy retain scan in input order: an item is dropped iff its cosine
// similarity to any previously retained item exceeds the threshold.
std::vector<std::string> dedup(const std::vector<std::pair<std::string, std::string>>& items,
                               double threshold, EmbeddingProvider& embedder);

constexpr double kDefaultDedupThreshold = 0.7;

struct MinedAssets {
  std::vector<CommunityPost> classified_posts;
  std::vector<QuestionTemplate> templates;
  std::vector<Persona> personas;
  std::size_t classify_failures = 0;
  std::size_t extract_failures = 0;
};

struct MineOptions {
  double dedup_threshold = kDefaultDedupThreshold;
  double persona_confidence_floor = 0.5;
  // Optional expert review applied after dedup: ids to force-drop, and, when
  // non-empty, the only ids allowed through.
  std::vector<std::string> deny_ids;
  std::vector<std::string> allow_ids;
};

// Full mining pass over posts (classification, extraction, dedup in
// created_at-then-post_id order, expert lists).
MinedAssets mine_assets(std::vector<CommunityPost> posts, const Taxonomy& taxonomy,
                        CompletionProvider& provider, EmbeddingProvider& embedder,
                        const PromptLibrary& prompts, const MineOptions& options = {});

}  // namespace chronoplay
