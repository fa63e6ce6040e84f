#include "chronoplay/community.hpp"

#include <algorithm>

namespace chronoplay {

CommunityPost post_from_json(const nlohmann::json& j) {
  CommunityPost p;
  p.post_id = j.at("post_id").get<std::string>();
  p.text = j.at("text").get<std::string>();
  p.created_at = j.at("created_at").get<Instant>();
  p.game_id = j.value("game_id", "");
  if (j.contains("topic") && !j["topic"].is_null()) {
    p.topic = TopicId::parse(j["topic"].get<std::string>());
  }
  if (p.text.empty()) {
    throw Error(ErrorKind::validation, "post " + p.post_id + " has empty text");
  }
  return p;
}

nlohmann::json to_json(const CommunityPost& p) {
  nlohmann::json j;
  j["post_id"] = p.post_id;
  j["text"] = p.text;
  j["created_at"] = p.created_at;
  j["game_id"] = p.game_id;
  if (p.topic) j["topic"] = p.topic->render();
  return j;
}

QuestionTemplate template_from_json(const nlohmann::json& j) {
  QuestionTemplate t;
  t.template_id = j.at("template_id").get<std::string>();
  t.template_text = j.at("template").get<std::string>();
  t.placeholders = j.value("placeholders", std::vector<std::string>{});
  t.topic = TopicId::parse(j.at("topic").get<std::string>());
  t.description = j.value("description", "");
  return t;
}

nlohmann::json to_json(const QuestionTemplate& t) {
  nlohmann::json j;
  j["template_id"] = t.template_id;
  j["template"] = t.template_text;
  j["placeholders"] = t.placeholders;
  j["topic"] = t.topic.render();
  j["description"] = t.description;
  return j;
}

Persona persona_from_json(const nlohmann::json& j) {
  Persona p;
  p.persona_id = j.at("persona_id").get<std::string>();
  p.description = j.at("description").get<std::string>();
  p.confidence = j.at("confidence").get<double>();
  return p;
}

nlohmann::json to_json(const Persona& p) {
  nlohmann::json j;
  j["persona_id"] = p.persona_id;
  j["description"] = p.description;
  j["confidence"] = p.confidence;
  return j;
}

TopicId classify_topic(const CommunityPost& post, const Taxonomy& taxonomy,
                       CompletionProvider& provider, const PromptLibrary& prompts) {
  CompletionRequest request;
  request.system_prompt = "TASK:CLASSIFY\nYou label player questions with taxonomy topics.";
  request.user_prompt = fill_placeholders(prompts.get("community/classify"),
                                          {{"[Taxonomy]", taxonomy.render_leaf_list()},
                                           {"[Question_Content]", post.text}});
  request.expect = ExpectKind::json_object;
  for (int attempt = 0; attempt < 2; ++attempt) {
    nlohmann::json out = complete_json(provider, request);
    try {
      TopicId topic = TopicId::parse(out.value("topic", ""));
      if (taxonomy.contains(topic)) return topic;
    } catch (const Error&) {
      // fall through to retry
    }
  }
  throw Error(ErrorKind::classification,
              "post " + post.post_id + " could not be classified to a taxonomy leaf");
}

namespace {

bool placeholder_consistent(const QuestionTemplate& t) {
  std::vector<std::string> in_text = placeholders_in(t.template_text);
  std::vector<std::string> declared = t.placeholders;
  std::sort(in_text.begin(), in_text.end());
  std::sort(declared.begin(), declared.end());
  in_text.erase(std::unique(in_text.begin(), in_text.end()), in_text.end());
  declared.erase(std::unique(declared.begin(), declared.end()), declared.end());
  return in_text == declared;
}

std::string template_content_id(const std::string& text, const TopicId& topic) {
  return "tmpl-" + hex64(fnv1a64(topic.render() + "\x1f" + text));
}

}  // namespace

std::vector<QuestionTemplate> extract_templates(const CommunityPost& post,
                                                CompletionProvider& provider,
                                                const PromptLibrary& prompts) {
  if (!post.topic) {
    throw Error(ErrorKind::contract,
                "extract_templates requires a classified post: " + post.post_id);
  }
  CompletionRequest request;
  request.system_prompt = "TASK:TEMPLATE\nYou mine reusable question templates.";
  request.user_prompt = fill_placeholders(prompts.get("community/extract_templates"),
                                          {{"[Question_Content]", post.text},
                                           {"[Question_Topic]", post.topic->render()}});
  request.expect = ExpectKind::json_object;
  nlohmann::json out;
  try {
    out = complete_json(provider, request);
  } catch (const Error& e) {
    throw Error(ErrorKind::extraction, std::string("template extraction failed: ") + e.what());
  }
  if (!out.contains("templates") || !out["templates"].is_array() ||
      out["templates"].empty()) {
    throw Error(ErrorKind::extraction,
                "template extraction returned no templates for post " + post.post_id);
  }
  std::vector<QuestionTemplate> templates;
  for (const auto& tj : out["templates"]) {
    QuestionTemplate t;
    t.template_text = tj.value("template", "");
    t.placeholders = tj.value("placeholders", std::vector<std::string>{});
    t.description = tj.value("description", "");
    t.topic = *post.topic;
    t.template_id = template_content_id(t.template_text, t.topic);
    if (t.template_text.empty()) {
      throw Error(ErrorKind::extraction, "empty template text for post " + post.post_id);
    }
    if (!placeholder_consistent(t)) {
      throw Error(ErrorKind::extraction,
                  "placeholder mismatch in template for post " + post.post_id + ": " +
                      t.template_text);
    }
    templates.push_back(std::move(t));
    if (templates.size() == 3) break;  // 2-3 expected; extras truncate
  }
  return templates;
}

std::optional<Persona> extract_persona(const CommunityPost& post,
                                       CompletionProvider& provider,
                                       const PromptLibrary& prompts,
                                       double confidence_floor) {
  CompletionRequest request;
  request.system_prompt = "TASK:PERSONA\nYou infer player backgrounds from questions.";
  request.user_prompt = fill_placeholders(prompts.get("community/extract_persona"),
                                          {{"[Question_Content]", post.text}});
  request.expect = ExpectKind::json_object;
  nlohmann::json out;
  try {
    out = complete_json(provider, request);
  } catch (const Error& e) {
    throw Error(ErrorKind::extraction, std::string("persona extraction failed: ") + e.what());
  }
  if (!out.contains("player_description") || out["player_description"].is_null()) {
    return std::nullopt;
  }
  Persona p;
  p.description = out["player_description"].get<std::string>();
  p.confidence = out.value("confidence_score", 0.0);
  if (p.confidence < confidence_floor) return std::nullopt;
  p.persona_id = "pers-" + hex64(fnv1a64(p.description));
  return p;
}

std::vector<std::string> dedup(const std::vector<std::pair<std::string, std::string>>& items,
                               double threshold, EmbeddingProvider& embedder) {
  if (threshold <= 0.0 || threshold > 1.0) {
    throw Error(ErrorKind::config, "dedup threshold must be in (0, 1]");
  }
  std::vector<std::string> retained;
  std::vector<Embedding> retained_vectors;
  for (const auto& [id, text] : items) {
    Embedding e = embedder.embed(text);
    bool duplicate = false;
    for (const auto& kept : retained_vectors) {
      if (cosine_similarity(e, kept) > threshold) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) {
      retained.push_back(id);
      retained_vectors.push_back(std::move(e));
    }
  }
  return retained;
}

MinedAssets mine_assets(std::vector<CommunityPost> posts, const Taxonomy& taxonomy,
                        CompletionProvider& provider, EmbeddingProvider& embedder,
                        const PromptLibrary& prompts, const MineOptions& options) {
  // Older authentic phrasing wins dedup ties.
  std::sort(posts.begin(), posts.end(), [](const CommunityPost& a, const CommunityPost& b) {
    if (a.created_at != b.created_at) return a.created_at < b.created_at;
    return a.post_id < b.post_id;
  });

  MinedAssets out;
  std::vector<QuestionTemplate> all_templates;
  std::vector<Persona> all_personas;
  for (auto& post : posts) {
    if (!post.topic) {
      try {
        post.topic = classify_topic(post, taxonomy, provider, prompts);
      } catch (const Error&) {
        ++out.classify_failures;
        continue;
      }
    }
    out.classified_posts.push_back(post);
    try {
      auto templates = extract_templates(post, provider, prompts);
      all_templates.insert(all_templates.end(), templates.begin(), templates.end());
      if (auto persona =
              extract_persona(post, provider, prompts, options.persona_confidence_floor)) {
        all_personas.push_back(*persona);
      }
    } catch (const Error&) {
      ++out.extract_failures;
    }
  }

  // Drop exact id duplicates (same text + topic mined twice) before the
  // semantic pass.
  auto unique_by_id = [](auto& items, auto id_of) {
    std::set<std::string> seen;
    items.erase(std::remove_if(items.begin(), items.end(),
                               [&](const auto& item) { return !seen.insert(id_of(item)).second; }),
                items.end());
  };
  unique_by_id(all_templates, [](const QuestionTemplate& t) { return t.template_id; });
  unique_by_id(all_personas, [](const Persona& p) { return p.persona_id; });

  auto apply_expert_lists = [&](const std::string& id) {
    if (std::find(options.deny_ids.begin(), options.deny_ids.end(), id) !=
        options.deny_ids.end()) {
      return false;
    }
    if (!options.allow_ids.empty() &&
        std::find(options.allow_ids.begin(), options.allow_ids.end(), id) ==
            options.allow_ids.end()) {
      return false;
    }
    return true;
  };

  // Templates dedup within their topic: a template-topic pair is the unit of
  // T_comm, and synthesis retries need every covered topic to keep at least
  // one pattern.
  std::map<TopicId, std::vector<std::pair<std::string, std::string>>> by_topic;
  for (const auto& t : all_templates) {
    by_topic[t.topic].emplace_back(t.template_id, t.template_text);
  }
  std::set<std::string> kept_templates;
  for (const auto& [topic, items] : by_topic) {
    for (const auto& id : dedup(items, options.dedup_threshold, embedder)) {
      if (apply_expert_lists(id)) kept_templates.insert(id);
    }
  }
  for (const auto& t : all_templates) {
    if (kept_templates.count(t.template_id)) out.templates.push_back(t);
  }

  std::vector<std::pair<std::string, std::string>> persona_items;
  for (const auto& p : all_personas) persona_items.emplace_back(p.persona_id, p.description);
  std::set<std::string> kept_personas;
  for (const auto& id : dedup(persona_items, options.dedup_threshold, embedder)) {
    if (apply_expert_lists(id)) kept_personas.insert(id);
  }
  for (const auto& p : all_personas) {
    if (kept_personas.count(p.persona_id)) out.personas.push_back(p);
  }
  return out;
}

}  // namespace chronoplay
