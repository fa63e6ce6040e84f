#include "chronoplay/synthesis.hpp"

#include <algorithm>
#include <regex>

namespace chronoplay {

void SynthesisConfig::validate() const {
  if (max_retries < 1) throw Error(ErrorKind::config, "max_retries must be >= 1");
  if (top_k_refs < 1) throw Error(ErrorKind::config, "top_k_refs must be >= 1");
  if (question_types.empty()) {
    throw Error(ErrorKind::config, "question_types must be non-empty");
  }
  if (persona_threshold < 0.0 || persona_threshold > 1.0) {
    throw Error(ErrorKind::config, "persona_threshold must be in [0, 1]");
  }
}

TemplateBase::TemplateBase(std::vector<QuestionTemplate> templates)
    : templates_(std::move(templates)) {}

std::vector<const QuestionTemplate*> TemplateBase::for_topic(const TopicId& topic) const {
  std::vector<const QuestionTemplate*> out;
  for (const auto& t : templates_) {
    if (t.topic == topic) out.push_back(&t);
  }
  return out;
}

std::vector<TopicId> TemplateBase::topics() const {
  std::set<TopicId> seen;
  for (const auto& t : templates_) seen.insert(t.topic);
  return {seen.begin(), seen.end()};
}

const QuestionTemplate& sample_template(const TemplateBase& base,
                                        const std::optional<TopicId>& topic, Rng& rng,
                                        const std::set<std::string>& exclude) {
  std::vector<const QuestionTemplate*> candidates;
  if (topic) {
    candidates = base.for_topic(*topic);
  } else {
    for (const auto& t : base.all()) candidates.push_back(&t);
  }
  if (candidates.empty()) {
    throw Error(ErrorKind::sampling,
                "no templates available" + (topic ? " for topic " + topic->render() : ""));
  }
  std::vector<const QuestionTemplate*> fresh;
  for (const auto* t : candidates) {
    if (!exclude.count(t->template_id)) fresh.push_back(t);
  }
  const auto& pool = fresh.empty() ? candidates : fresh;
  return *pool[rng.bounded(pool.size())];
}

namespace {

const std::string& query_type_description(const std::string& type) {
  static const std::map<std::string, std::string> table = {
      {"extractive", "The answer is a short fact extractable from one document segment."},
      {"multi_hop", "Answering requires combining at least two separate document segments."},
      {"comparative", "The question compares two or more items, options, or versions."},
      {"summarization", "The answer condenses a longer document section into a short summary."},
      {"long_dependency",
       "The answer depends on information spread across distant parts of the documents."},
  };
  static const std::string generic = "General evaluation question.";
  auto it = table.find(type);
  return it == table.end() ? generic : it->second;
}

bool has_unresolved_placeholder(const std::string& text) {
  static const std::regex ph(R"(\[[A-Z][A-Z0-9_]*\])");
  return std::regex_search(text, ph);
}

}  // namespace

Synthesizer::Synthesizer(SynthesisConfig config, std::string game_id,
                         const Taxonomy& taxonomy, TemplateBase templates,
                         std::vector<Persona> personas, KnowledgeBase kb,
                         CompletionProvider& completion, EmbeddingProvider& embedder,
                         const PromptLibrary& prompts)
    : config_(std::move(config)),
      game_id_(std::move(game_id)),
      taxonomy_(taxonomy),
      template_base_(std::move(templates)),
      personas_(std::move(personas)),
      kb_(std::move(kb)),
      completion_(completion),
      embedder_(embedder),
      prompts_(prompts),
      rng_(Rng(config_.seed).substream("synthesis")) {
  config_.validate();
  kb_index_ = VectorIndex::build(kb_.snippets(), embedder_);
  persona_embeddings_.reserve(personas_.size());
  for (const auto& p : personas_) {
    persona_embeddings_.push_back(embedder_.embed(p.description));
  }
}

void Synthesizer::set_kb(KnowledgeBase kb) {
  kb_ = std::move(kb);
  kb_index_ = VectorIndex::build(kb_.snippets(), embedder_);
}

std::string Synthesizer::query_text(const HypotheticalQA& hypo) const {
  if (!config_.ablation.use_hypothetical) return hypo.question;
  return hypo.question + "\n" + hypo.answer;
}

QuestionTemplate Synthesizer::generic_template(const TopicId& topic) const {
  QuestionTemplate t;
  t.template_id = "generic-" + to_lower(topic.sub);
  t.template_text = "What should players know about " + taxonomy_.display(topic) +
                    " in [GAME_NAME]?";
  t.placeholders = {"GAME_NAME"};
  t.topic = topic;
  t.description = "Generic topic-only instruction.";
  return t;
}

HypotheticalQA Synthesizer::generate_hypothetical_qa(const QuestionTemplate& tmpl,
                                                     const TopicId& topic) {
  CompletionRequest request;
  request.system_prompt = "TASK:HYPO_QA\nYou draft hypothetical player Q&A pairs.";
  request.user_prompt = fill_placeholders(
      prompts_.get("synthesis/hypo_qa"),
      {{"[Question_Template]", tmpl.template_text},
       {"[Question_Topic]", topic.render() + ": " + taxonomy_.description(topic)},
       {"{game_name}", game_id_}});
  request.seed = rng_.next_u64();
  nlohmann::json out;
  try {
    out = complete_json(completion_, request);
  } catch (const Error& e) {
    throw Error(ErrorKind::synthesis,
                std::string("hypothetical Q&A generation failed: ") + e.what());
  }
  HypotheticalQA hypo;
  hypo.question = out.value("question", "");
  hypo.answer = out.value("answer", "");
  hypo.source_template_id = tmpl.template_id;
  if (hypo.question.empty() || hypo.answer.empty()) {
    throw Error(ErrorKind::synthesis, "hypothetical Q&A output missing question/answer");
  }
  if (has_unresolved_placeholder(hypo.question)) {
    throw Error(ErrorKind::validation,
                "unresolved placeholder in hypothetical question: " + hypo.question);
  }
  return hypo;
}

std::vector<KnowledgeSnippet> Synthesizer::retrieve_reference_snippets(
    const HypotheticalQA& hypo, std::size_t k) const {
  if (kb_index_.empty()) {
    throw Error(ErrorKind::retrieval, "knowledge base is empty");
  }
  const Embedding query = embedder_.embed(query_text(hypo));
  std::vector<KnowledgeSnippet> out;
  for (const auto& [id, sim] : kb_index_.top_k(query, k)) {
    out.push_back(*kb_.find(id));
  }
  return out;
}

std::optional<Persona> Synthesizer::match_persona(const HypotheticalQA& hypo) const {
  if (!config_.ablation.use_persona || personas_.empty()) return std::nullopt;
  const Embedding query = embedder_.embed(hypo.question + "\n" + hypo.answer);
  double best = -2.0;
  std::size_t best_idx = 0;
  for (std::size_t i = 0; i < personas_.size(); ++i) {
    const double sim = cosine_similarity(query, persona_embeddings_[i]);
    if (sim > best) {
      best = sim;
      best_idx = i;
    }
  }
  if (best > config_.persona_threshold) return personas_[best_idx];
  return std::nullopt;
}

std::optional<EvalTuple> Synthesizer::synthesize_candidate(
    const QuestionTemplate& tmpl, const TopicId& topic,
    const std::vector<KnowledgeSnippet>& refs, const std::optional<Persona>& persona,
    const std::string& question_type) {
  if (refs.empty()) {
    throw Error(ErrorKind::contract, "synthesize_candidate: no reference snippets");
  }
  CompletionRequest request;
  request.system_prompt = prompts_.get("synthesis/agent_system");
  request.user_prompt = fill_placeholders(
      prompts_.get("synthesis/agent_user"),
      {{"[Topic_Description]", topic.render() + ": " + taxonomy_.description(topic)},
       {"[Query_Type]", question_type},
       {"[Query_Type_Description]", query_type_description(question_type)},
       {"[Role_Context]", persona ? persona->description : "(none)"},
       {"[Question_Template]",
        fill_placeholders(tmpl.template_text, {{"[GAME_NAME]", game_id_}})},
       {"[Documents]", render_documents(refs)}});
  request.seed = rng_.next_u64();
  const std::string raw = completion_.complete(request);

  const auto open = raw.find("<json>");
  const auto close = raw.find("</json>");
  if (open == std::string::npos || close == std::string::npos || close <= open) {
    throw Error(ErrorKind::synthesis, "synthesis output lacks a <json> envelope");
  }
  nlohmann::json list = nlohmann::json::parse(
      raw.substr(open + 6, close - open - 6), nullptr, false);
  if (list.is_discarded() || !list.is_array()) {
    throw Error(ErrorKind::synthesis, "synthesis envelope is not a JSON list");
  }
  if (list.empty()) return std::nullopt;  // document judged unsuitable

  const nlohmann::json& item = list.at(0);
  const std::string question = item.value("question", "");
  const std::string answer = item.value("answer", "");
  if (question.empty() || answer.empty()) {
    throw Error(ErrorKind::synthesis, "synthesis item missing question/answer");
  }
  if (!item.contains("references") || !item["references"].is_array() ||
      item["references"].empty()) {
    throw Error(ErrorKind::grounding, "synthesis item has no references");
  }

  // Match each quoted segment back to a snippet by whitespace-normalized
  // substring containment, in the provided snippet order.
  std::vector<std::string> ref_ids;
  std::vector<std::string> normalized_contents;
  normalized_contents.reserve(refs.size());
  for (const auto& s : refs) normalized_contents.push_back(collapse_whitespace(s.content));
  for (const auto& ref_json : item["references"]) {
    const std::string segment = collapse_whitespace(ref_json.get<std::string>());
    if (segment.empty()) continue;
    bool matched = false;
    for (std::size_t i = 0; i < refs.size(); ++i) {
      if (normalized_contents[i].find(segment) != std::string::npos) {
        if (std::find(ref_ids.begin(), ref_ids.end(), refs[i].id) == ref_ids.end()) {
          ref_ids.push_back(refs[i].id);
        }
        matched = true;
        break;
      }
    }
    if (!matched) {
      throw Error(ErrorKind::grounding,
                  "reference segment not found in any provided snippet: " + segment);
    }
  }
  if (ref_ids.empty()) {
    throw Error(ErrorKind::grounding, "no usable reference segments");
  }

  std::vector<KnowledgeSnippet> matched_refs;
  for (const auto& id : ref_ids) matched_refs.push_back(*kb_.find(id));

  EvalTuple tuple;
  tuple.question = question;
  tuple.answer = answer;
  tuple.ref_ids = ref_ids;
  tuple.topic = topic;
  tuple.timestamp = derive_tuple_timestamp(matched_refs);
  tuple.entities = derive_tuple_entities(matched_refs);
  tuple.question_type = question_type;
  if (persona) tuple.persona_id = persona->persona_id;
  tuple.origin = Origin::synthesized;
  tuple.id = tuple_content_id(tuple.question, tuple.answer, tuple.ref_ids);
  return tuple;
}

int Synthesizer::quality_gate(const EvalTuple& candidate, const TopicId& topic,
                              const std::string& question_type,
                              const std::vector<KnowledgeSnippet>& refs) {
  nlohmann::json generated;
  generated["question"] = candidate.question;
  generated["answer"] = candidate.answer;
  generated["references"] = candidate.ref_ids;

  CompletionRequest request;
  request.system_prompt = prompts_.get("synthesis/qc_system");
  request.user_prompt = fill_placeholders(
      prompts_.get("synthesis/qc_user"),
      {{"[Documents]", render_documents(refs)},
       {"[Topic_Description]", topic.render() + ": " + taxonomy_.description(topic)},
       {"[Query_Type]", question_type + ": " + query_type_description(question_type)},
       {"[Generated_Data]", generated.dump()}});
  request.seed = rng_.next_u64();
  nlohmann::json out;
  try {
    out = complete_json(completion_, request);
  } catch (const Error& e) {
    throw Error(ErrorKind::judge, std::string("quality gate failed: ") + e.what());
  }
  if (!out.contains("evaluation") || !out["evaluation"].is_number_integer()) {
    throw Error(ErrorKind::judge, "quality gate output lacks an integer evaluation");
  }
  const int score = out["evaluation"].get<int>();
  if (score < 0 || score > 2) {
    throw Error(ErrorKind::judge,
                "quality gate score out of range: " + std::to_string(score));
  }
  return score;
}

EvalTuple Synthesizer::synthesize_tuple(const TopicId& topic,
                                        std::vector<SynthesisAttempt>* transcript) {
  std::vector<SynthesisAttempt> local;
  std::vector<SynthesisAttempt>& log = transcript ? *transcript : local;
  std::set<std::string> tried_templates;
  for (int attempt = 1; attempt <= config_.max_retries; ++attempt) {
    SynthesisAttempt entry;
    entry.attempt = attempt;
    try {
      const QuestionTemplate tmpl =
          config_.ablation.use_template
              ? sample_template(template_base_, topic, rng_, tried_templates)
              : generic_template(topic);
      tried_templates.insert(tmpl.template_id);
      entry.template_id = tmpl.template_id;

      const HypotheticalQA hypo = generate_hypothetical_qa(tmpl, topic);
      const std::vector<KnowledgeSnippet> refs = retrieve_reference_snippets(
          hypo, static_cast<std::size_t>(config_.top_k_refs));
      const std::optional<Persona> persona = match_persona(hypo);
      const std::string question_type =
          config_.question_types[rng_.bounded(config_.question_types.size())];

      std::optional<EvalTuple> candidate =
          synthesize_candidate(tmpl, topic, refs, persona, question_type);
      if (!candidate) {
        entry.outcome = "unsuitable";
        log.push_back(entry);
        continue;
      }
      const int score = quality_gate(*candidate, topic, question_type, refs);
      if (score == 2) {
        entry.outcome = "accepted";
        log.push_back(entry);
        return *candidate;
      }
      entry.outcome = "gate=" + std::to_string(score);
      log.push_back(entry);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::provider || e.kind() == ErrorKind::config ||
          e.kind() == ErrorKind::sampling) {
        throw;  // not recoverable by retrying the same loop
      }
      entry.outcome = std::string("error: ") + e.what();
      log.push_back(entry);
    }
  }
  std::string summary = "synthesis exhausted after " +
                        std::to_string(config_.max_retries) + " attempts for topic " +
                        topic.render() + ";";
  for (const auto& a : log) {
    summary += " [" + std::to_string(a.attempt) + "] " + a.template_id + " -> " +
               a.outcome + ";";
  }
  throw Error(ErrorKind::exhausted, summary);
}

}  // namespace chronoplay
