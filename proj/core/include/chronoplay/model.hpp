#pragma once
// Benchmark data model: knowledge snippets, evaluation tuples, and the
// versioned slice that pairs a knowledge base with a tuple set.
// All values are immutable after construction; evolution builds new slices.

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "chronoplay/common.hpp"
#include "chronoplay/taxonomy.hpp"

namespace chronoplay {

enum class SourceKind { wiki, official_update };
enum class Origin { synthesized, inherited, knowledge_update, interest_update };

std::string to_string(SourceKind k);
std::string to_string(Origin o);
SourceKind source_kind_from_string(std::string_view s);
Origin origin_from_string(std::string_view s);

// One retrievable unit of the authority corpus.
struct KnowledgeSnippet {
  std::string id;
  std::string content;
  std::optional<Instant> timestamp;
  std::set<EntityId> entities;
  SourceKind source_kind = SourceKind::wiki;
  std::string game_id;
};

// One benchmark item. `id` is a content hash of (question, answer,
// sorted ref_ids) so identical regenerations deduplicate naturally.
struct EvalTuple {
  std::string id;
  std::string question;
  std::string answer;
  std::vector<std::string> ref_ids;
  TopicId topic;
  std::optional<Instant> timestamp;
  std::set<EntityId> entities;
  std::string question_type;
  std::optional<std::string> persona_id;
  Origin origin = Origin::synthesized;
};

std::string tuple_content_id(const std::string& question, const std::string& answer,
                             std::vector<std::string> ref_ids);

// Versioned snippet collection. `version` is a content address, so equal
// content always gets the same id regardless of how it was assembled.
class KnowledgeBase {
public:
  KnowledgeBase() = default;
  static KnowledgeBase from_snippets(std::vector<KnowledgeSnippet> snippets);

  const std::string& version() const { return version_; }
  const std::vector<KnowledgeSnippet>& snippets() const { return snippets_; }
  const KnowledgeSnippet* find(const std::string& id) const;
  bool empty() const { return snippets_.empty(); }
  std::size_t size() const { return snippets_.size(); }

  // Set union by snippet id. A colliding id with different content is a
  // validation error; exact duplicates are kept once.
  KnowledgeBase union_with(const std::vector<KnowledgeSnippet>& added) const;

private:
  std::string version_;
  std::vector<KnowledgeSnippet> snippets_;
  std::map<std::string, std::size_t> by_id_;
};

struct BenchmarkSlice {
  int index = 0;
  std::string kb_version;
  std::vector<EvalTuple> tuples;
  Instant phase_start = 0;
  std::optional<Instant> phase_end;
  std::optional<int> parent_index;
};

// Tuple timestamp rule: max over referenced snippets that carry one;
// absent when none do.
std::optional<Instant> derive_tuple_timestamp(const std::vector<KnowledgeSnippet>& refs);

// Tuple entity rule: union over referenced snippets' entity sets.
std::set<EntityId> derive_tuple_entities(const std::vector<KnowledgeSnippet>& refs);

// Ordering helper used by eviction: absent timestamps sort before any
// present timestamp; ties break by tuple id ascending.
bool older_than(const EvalTuple& a, const EvalTuple& b);

struct Violation {
  std::string tuple_id;
  std::string rule;
  std::string detail;
};

// Empty report iff every tuple invariant holds against kb. Pass the
// taxonomy to also check that topics are valid leaves.
std::vector<Violation> validate_slice(const BenchmarkSlice& slice,
                                      const KnowledgeBase& kb,
                                      const Taxonomy* taxonomy = nullptr);

// JSON (de)serialization. Field names are part of the file contract.
nlohmann::json to_json(const KnowledgeSnippet& s);
nlohmann::json to_json(const EvalTuple& t);
nlohmann::json slice_manifest_json(const BenchmarkSlice& slice);
KnowledgeSnippet snippet_from_json(const nlohmann::json& j);
EvalTuple tuple_from_json(const nlohmann::json& j);
BenchmarkSlice slice_from_manifest_json(const nlohmann::json& j);

// JSON-lines IO. Parse errors carry the 1-based line number.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path,
                 const std::vector<nlohmann::json>& rows);

std::vector<KnowledgeSnippet> read_snippets_jsonl(const std::filesystem::path& path);
void write_snippets_jsonl(const std::filesystem::path& path,
                          const std::vector<KnowledgeSnippet>& snippets);
std::vector<EvalTuple> read_tuples_jsonl(const std::filesystem::path& path);
void write_tuples_jsonl(const std::filesystem::path& path,
                        const std::vector<EvalTuple>& tuples);

}  // namespace chronoplay
