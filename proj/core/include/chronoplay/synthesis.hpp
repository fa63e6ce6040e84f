#pragma once
// Multi-stage tuple synthesis: template sampling, hypothetical Q&A,
// reference retrieval, persona matching, agent synthesis, and the
// quality-control self-correction loop.

#include <optional>
#include <vector>

#include "chronoplay/community.hpp"
#include "chronoplay/model.hpp"
#include "chronoplay/prompts.hpp"
#include "chronoplay/providers.hpp"
#include "chronoplay/rag_eval.hpp"
#include "chronoplay/taxonomy.hpp"

namespace chronoplay {

struct AblationFlags {
  bool use_hypothetical = true;  // off: query is the instantiated question alone
  bool use_persona = true;       // off: synthesis never attaches a persona
  bool use_template = true;      // off: a generic topic-only instruction replaces it
};

struct SynthesisConfig {
  std::vector<std::string> question_types = {
      "extractive", "multi_hop", "comparative", "summarization", "long_dependency"};
  double persona_threshold = 0.6;  // lambda_p, strict >
  int top_k_refs = 3;
  int max_retries = 3;
  AblationFlags ablation;
  std::uint64_t seed = 0;

  void validate() const;
};

struct HypotheticalQA {
  std::string question;
  std::string answer;
  std::string source_template_id;
};

class TemplateBase {
public:
  TemplateBase() = default;
  explicit TemplateBase(std::vector<QuestionTemplate> templates);

  const std::vector<QuestionTemplate>& all() const { return templates_; }
  std::vector<const QuestionTemplate*> for_topic(const TopicId& topic) const;
  std::vector<TopicId> topics() const;
  bool empty() const { return templates_.empty(); }

private:
  std::vector<QuestionTemplate> templates_;
};

// Uniform seeded draw among the topic's templates (or all templates when no
// topic is given). Ids in `exclude` are skipped when alternatives remain.
const QuestionTemplate& sample_template(const TemplateBase& base,
                                        const std::optional<TopicId>& topic, Rng& rng,
                                        const std::set<std::string>& exclude = {});

struct SynthesisAttempt {
  int attempt = 0;
  std::string template_id;
  std::string outcome;  // "accepted", "gate=<n>", "unsuitable", error text
};

// Owns the provider handles, bases, and retrieval index for one synthesis
// session. Provider calls are issued sequentially; per-call seeds come from
// the session RNG so repeated runs with one seed reproduce bit-identically.
class Synthesizer {
public:
  Synthesizer(SynthesisConfig config, std::string game_id, const Taxonomy& taxonomy,
              TemplateBase templates, std::vector<Persona> personas,
              KnowledgeBase kb, CompletionProvider& completion,
              EmbeddingProvider& embedder, const PromptLibrary& prompts);

  const KnowledgeBase& kb() const { return kb_; }
  const SynthesisConfig& config() const { return config_; }
  const TemplateBase& templates() const { return template_base_; }

  // Swaps in an evolved knowledge base and rebuilds the retrieval index.
  void set_kb(KnowledgeBase kb);

  HypotheticalQA generate_hypothetical_qa(const QuestionTemplate& tmpl,
                                          const TopicId& topic);

  // Exact cosine top-k over the knowledge base; the query embeds the
  // hypothetical pair (or the instantiated question alone under the
  // no-hypothetical ablation).
  std::vector<KnowledgeSnippet> retrieve_reference_snippets(const HypotheticalQA& hypo,
                                                            std::size_t k) const;

  // Highest-cosine persona when its similarity strictly exceeds lambda_p.
  std::optional<Persona> match_persona(const HypotheticalQA& hypo) const;

  // One agent call. Returns nullopt when the provider deems the documents
  // unsuitable (empty list). References must quote provided snippets.
  std::optional<EvalTuple> synthesize_candidate(const QuestionTemplate& tmpl,
                                                const TopicId& topic,
                                                const std::vector<KnowledgeSnippet>& refs,
                                                const std::optional<Persona>& persona,
                                                const std::string& question_type);

  // {"evaluation": s}, s in {0, 1, 2}.
  int quality_gate(const EvalTuple& candidate, const TopicId& topic,
                   const std::string& question_type,
                   const std::vector<KnowledgeSnippet>& refs);

  // Full loop with the same-topic retry rule; accepts only gate score 2.
  // Throws ErrorKind::exhausted carrying the attempt transcript.
  EvalTuple synthesize_tuple(const TopicId& topic,
                             std::vector<SynthesisAttempt>* transcript = nullptr);

  Rng& rng() { return rng_; }

private:
  std::string query_text(const HypotheticalQA& hypo) const;
  QuestionTemplate generic_template(const TopicId& topic) const;

  SynthesisConfig config_;
  std::string game_id_;
  const Taxonomy& taxonomy_;
  TemplateBase template_base_;
  std::vector<Persona> personas_;
  std::vector<Embedding> persona_embeddings_;
  KnowledgeBase kb_;
  VectorIndex kb_index_;
  CompletionProvider& completion_;
  EmbeddingProvider& embedder_;
  const PromptLibrary& prompts_;
  Rng rng_;
};

}  // namespace chronoplay
