#pragma once
// In-game entity extraction and the inverted index that makes update
// targeting (stale-set lookup) cheap.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "chronoplay/prompts.hpp"
#include "chronoplay/providers.hpp"

namespace chronoplay {

// Lowercase, whitespace-collapsed, trimmed. Blank input is a validation
// error.
EntityId normalize_entity(std::string_view raw);

enum class ExtractorKind { llm_self_icl, dictionary };

struct NerConfig {
  int pseudo_examples = 3;
  std::string entity_descriptor;  // fills [Entity_Desc]
};

// Three-stage extraction: pseudo-input generation, pseudo-label prediction,
// then in-context annotation of the real text.
std::set<EntityId> extract_entities_self_icl(const std::string& text,
                                             CompletionProvider& provider,
                                             const PromptLibrary& prompts,
                                             const NerConfig& config);

// Whole-word gazetteer matching (substrings never match).
std::set<EntityId> extract_entities_dictionary(const std::string& text,
                                               const std::vector<EntityId>& gazetteer);

// One entity per line, UTF-8, blanks skipped.
std::vector<EntityId> load_gazetteer(const std::filesystem::path& file);

class EntityIndex {
public:
  enum class ItemKind { snippet, tuple };

  static EntityIndex build(
      const std::vector<std::pair<std::string, std::set<EntityId>>>& items,
      ItemKind kind);

  // Every item id whose entity set intersects update_entities.
  std::set<std::string> lookup_affected(const std::set<EntityId>& update_entities) const;

  const std::map<EntityId, std::set<std::string>>& by_entity() const {
    return by_entity_;
  }
  ItemKind kind() const { return kind_; }

private:
  std::map<EntityId, std::set<std::string>> by_entity_;
  ItemKind kind_ = ItemKind::snippet;
};

}  // namespace chronoplay
