#include "chronoplay/entity.hpp"

#include <fstream>

namespace chronoplay {

EntityId normalize_entity(std::string_view raw) {
  std::string normalized = collapse_whitespace(to_lower(raw));
  if (normalized.empty()) {
    throw Error(ErrorKind::validation, "entity normalizes to empty string");
  }
  return normalized;
}

namespace {

std::set<EntityId> entities_from_json(const nlohmann::json& j) {
  std::set<EntityId> out;
  if (!j.contains("entities") || !j["entities"].is_array()) {
    throw Error(ErrorKind::extraction, "NER output lacks an entities array");
  }
  for (const auto& e : j["entities"]) {
    std::string text = e.value("text", "");
    if (collapse_whitespace(text).empty()) continue;
    out.insert(normalize_entity(text));
  }
  return out;
}

}  // namespace

std::set<EntityId> extract_entities_self_icl(const std::string& text,
                                             CompletionProvider& provider,
                                             const PromptLibrary& prompts,
                                             const NerConfig& config) {
  // Stage 1: pseudo-inputs stylistically close to the target text.
  CompletionRequest stage1;
  stage1.system_prompt = "TASK:NER_PSEUDO_INPUTS\nYou support a gaming NER pipeline.";
  stage1.user_prompt = fill_placeholders(
      prompts.get("ner/pseudo_inputs"),
      {{"[Num_Pseudo_Examples]", std::to_string(config.pseudo_examples)},
       {"[Question]", text}});
  stage1.expect = ExpectKind::json_object;
  nlohmann::json pseudo = complete_json(provider, stage1);
  std::vector<std::string> pseudo_inputs;
  for (const auto& p : pseudo.value("pseudo_inputs", nlohmann::json::array())) {
    pseudo_inputs.push_back(p.get<std::string>());
  }

  // Stage 2: zero-shot labels for each pseudo-input.
  std::string demonstrations;
  for (const auto& input : pseudo_inputs) {
    CompletionRequest stage2;
    stage2.system_prompt = "TASK:NER_PSEUDO_LABELS\nYou support a gaming NER pipeline.";
    stage2.user_prompt = fill_placeholders(prompts.get("ner/pseudo_labels"),
                                           {{"[Entity_Desc]", config.entity_descriptor},
                                            {"[Pseudo_Text]", input}});
    stage2.expect = ExpectKind::json_object;
    nlohmann::json labels = complete_json(provider, stage2);
    demonstrations += "Input: " + input + "\nEntities: " + labels.dump() + "\n";
  }

  // Stage 3: annotate the real text with those pairs as demonstrations.
  CompletionRequest stage3;
  stage3.system_prompt = "TASK:NER\nYou support a gaming NER pipeline.";
  stage3.user_prompt = fill_placeholders(prompts.get("ner/icl"),
                                         {{"[Entity_Desc]", config.entity_descriptor},
                                          {"[Demonstrations_Text]", demonstrations},
                                          {"[Question]", text}});
  stage3.expect = ExpectKind::json_object;
  try {
    return entities_from_json(complete_json(provider, stage3));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::parse) {
      throw Error(ErrorKind::extraction, std::string("NER output unusable: ") + e.what());
    }
    throw;
  }
}

std::set<EntityId> extract_entities_dictionary(const std::string& text,
                                               const std::vector<EntityId>& gazetteer) {
  const std::vector<std::string> text_tokens = tokenize(text);
  std::set<EntityId> out;
  for (const auto& raw_entry : gazetteer) {
    const EntityId entry = normalize_entity(raw_entry);
    const std::vector<std::string> entry_tokens = tokenize(entry);
    if (entry_tokens.empty() || entry_tokens.size() > text_tokens.size()) continue;
    for (std::size_t i = 0; i + entry_tokens.size() <= text_tokens.size(); ++i) {
      bool match = true;
      for (std::size_t k = 0; k < entry_tokens.size(); ++k) {
        if (text_tokens[i + k] != entry_tokens[k]) {
          match = false;
          break;
        }
      }
      if (match) {
        out.insert(entry);
        break;
      }
    }
  }
  return out;
}

std::vector<EntityId> load_gazetteer(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw Error(ErrorKind::config, "cannot open gazetteer: " + file.string());
  }
  std::vector<EntityId> out;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = collapse_whitespace(to_lower(line));
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

EntityIndex EntityIndex::build(
    const std::vector<std::pair<std::string, std::set<EntityId>>>& items,
    ItemKind kind) {
  EntityIndex index;
  index.kind_ = kind;
  std::set<std::string> seen;
  for (const auto& [id, entities] : items) {
    if (!seen.insert(id).second) {
      throw Error(ErrorKind::validation, "duplicate item id in entity index: " + id);
    }
    for (const auto& e : entities) index.by_entity_[e].insert(id);
  }
  return index;
}

std::set<std::string> EntityIndex::lookup_affected(
    const std::set<EntityId>& update_entities) const {
  std::set<std::string> out;
  for (const auto& e : update_entities) {
    auto it = by_entity_.find(e);
    if (it == by_entity_.end()) continue;
    out.insert(it->second.begin(), it->second.end());
  }
  return out;
}

}  // namespace chronoplay
