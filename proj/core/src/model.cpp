#include "chronoplay/model.hpp"

#include <algorithm>
#include <fstream>

namespace chronoplay {

std::string to_string(SourceKind k) {
  return k == SourceKind::wiki ? "wiki" : "official_update";
}

std::string to_string(Origin o) {
  switch (o) {
    case Origin::synthesized: return "synthesized";
    case Origin::inherited: return "inherited";
    case Origin::knowledge_update: return "knowledge_update";
    case Origin::interest_update: return "interest_update";
  }
  return "synthesized";
}

SourceKind source_kind_from_string(std::string_view s) {
  if (s == "wiki") return SourceKind::wiki;
  if (s == "official_update") return SourceKind::official_update;
  throw Error(ErrorKind::parse, "unknown source_kind: " + std::string(s));
}

Origin origin_from_string(std::string_view s) {
  if (s == "synthesized") return Origin::synthesized;
  if (s == "inherited") return Origin::inherited;
  if (s == "knowledge_update") return Origin::knowledge_update;
  if (s == "interest_update") return Origin::interest_update;
  throw Error(ErrorKind::parse, "unknown origin: " + std::string(s));
}

std::string tuple_content_id(const std::string& question, const std::string& answer,
                             std::vector<std::string> ref_ids) {
  std::sort(ref_ids.begin(), ref_ids.end());
  std::uint64_t h = fnv1a64(question);
  h = fnv1a64("\x1f", h);
  h = fnv1a64(answer, h);
  for (const auto& r : ref_ids) {
    h = fnv1a64("\x1f", h);
    h = fnv1a64(r, h);
  }
  return "t-" + hex64(h);
}

KnowledgeBase KnowledgeBase::from_snippets(std::vector<KnowledgeSnippet> snippets) {
  KnowledgeBase kb;
  kb.snippets_ = std::move(snippets);
  for (std::size_t i = 0; i < kb.snippets_.size(); ++i) {
    auto [it, inserted] = kb.by_id_.emplace(kb.snippets_[i].id, i);
    if (!inserted) {
      throw Error(ErrorKind::validation,
                  "duplicate snippet id in knowledge base: " + kb.snippets_[i].id);
    }
  }
  // Content address: hash of sorted (id, content-hash) pairs.
  std::vector<std::string> keys;
  keys.reserve(kb.snippets_.size());
  for (const auto& s : kb.snippets_) {
    keys.push_back(s.id + "\x1f" + hex64(fnv1a64(s.content)));
  }
  std::sort(keys.begin(), keys.end());
  std::uint64_t h = fnv1a64("kb");
  for (const auto& k : keys) h = fnv1a64(k + "\n", h);
  kb.version_ = "kb-" + hex64(h);
  return kb;
}

const KnowledgeSnippet* KnowledgeBase::find(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return nullptr;
  return &snippets_[it->second];
}

KnowledgeBase KnowledgeBase::union_with(const std::vector<KnowledgeSnippet>& added) const {
  std::vector<KnowledgeSnippet> merged = snippets_;
  for (const auto& s : added) {
    if (const KnowledgeSnippet* existing = find(s.id)) {
      if (existing->content != s.content) {
        throw Error(ErrorKind::validation,
                    "snippet id collision with differing content: " + s.id);
      }
      continue;
    }
    merged.push_back(s);
  }
  return from_snippets(std::move(merged));
}

std::optional<Instant> derive_tuple_timestamp(const std::vector<KnowledgeSnippet>& refs) {
  if (refs.empty()) {
    throw Error(ErrorKind::contract, "derive_tuple_timestamp: empty reference list");
  }
  std::optional<Instant> best;
  for (const auto& s : refs) {
    if (s.timestamp && (!best || *s.timestamp > *best)) best = s.timestamp;
  }
  return best;
}

std::set<EntityId> derive_tuple_entities(const std::vector<KnowledgeSnippet>& refs) {
  if (refs.empty()) {
    throw Error(ErrorKind::contract, "derive_tuple_entities: empty reference list");
  }
  std::set<EntityId> out;
  for (const auto& s : refs) out.insert(s.entities.begin(), s.entities.end());
  return out;
}

bool older_than(const EvalTuple& a, const EvalTuple& b) {
  const bool a_has = a.timestamp.has_value();
  const bool b_has = b.timestamp.has_value();
  if (a_has != b_has) return !a_has;  // absent sorts first
  if (a_has && *a.timestamp != *b.timestamp) return *a.timestamp < *b.timestamp;
  return a.id < b.id;
}

std::vector<Violation> validate_slice(const BenchmarkSlice& slice,
                                      const KnowledgeBase& kb,
                                      const Taxonomy* taxonomy) {
  std::vector<Violation> out;
  if (slice.kb_version != kb.version()) {
    throw Error(ErrorKind::lookup, "slice kb_version " + slice.kb_version +
                                       " does not match knowledge base " + kb.version());
  }
  std::set<std::string> seen_ids;
  for (const auto& t : slice.tuples) {
    if (!seen_ids.insert(t.id).second) {
      out.push_back({t.id, "duplicate id", "tuple id occurs more than once"});
    }
    if (t.ref_ids.empty()) {
      out.push_back({t.id, "empty refs", "ref_ids must be non-empty"});
      continue;
    }
    std::vector<KnowledgeSnippet> refs;
    bool unresolved = false;
    for (const auto& rid : t.ref_ids) {
      const KnowledgeSnippet* s = kb.find(rid);
      if (!s) {
        out.push_back({t.id, "unresolved ref", rid});
        unresolved = true;
      } else {
        refs.push_back(*s);
      }
    }
    if (unresolved) continue;
    if (derive_tuple_timestamp(refs) != t.timestamp) {
      out.push_back({t.id, "timestamp mismatch",
                     "stored timestamp differs from max over referenced snippets"});
    }
    if (derive_tuple_entities(refs) != t.entities) {
      out.push_back({t.id, "entity mismatch",
                     "stored entities differ from union over referenced snippets"});
    }
    if (taxonomy && !taxonomy->contains(t.topic)) {
      out.push_back({t.id, "unknown topic", t.topic.render()});
    }
  }
  return out;
}

nlohmann::json to_json(const KnowledgeSnippet& s) {
  nlohmann::json j;
  j["id"] = s.id;
  j["content"] = s.content;
  if (s.timestamp) j["timestamp"] = *s.timestamp;
  j["entities"] = std::vector<std::string>(s.entities.begin(), s.entities.end());
  j["source_kind"] = to_string(s.source_kind);
  j["game_id"] = s.game_id;
  return j;
}

KnowledgeSnippet snippet_from_json(const nlohmann::json& j) {
  KnowledgeSnippet s;
  s.id = j.at("id").get<std::string>();
  s.content = j.at("content").get<std::string>();
  if (j.contains("timestamp") && !j["timestamp"].is_null()) {
    s.timestamp = j["timestamp"].get<Instant>();
  }
  for (const auto& e : j.value("entities", nlohmann::json::array())) {
    s.entities.insert(e.get<std::string>());
  }
  s.source_kind = source_kind_from_string(j.at("source_kind").get<std::string>());
  s.game_id = j.value("game_id", "");
  return s;
}

nlohmann::json to_json(const EvalTuple& t) {
  nlohmann::json j;
  j["id"] = t.id;
  j["question"] = t.question;
  j["answer"] = t.answer;
  j["ref_ids"] = t.ref_ids;
  j["topic"] = t.topic.render();
  if (t.timestamp) j["timestamp"] = *t.timestamp;
  j["entities"] = std::vector<std::string>(t.entities.begin(), t.entities.end());
  j["question_type"] = t.question_type;
  if (t.persona_id) j["persona_id"] = *t.persona_id;
  j["origin"] = to_string(t.origin);
  return j;
}

EvalTuple tuple_from_json(const nlohmann::json& j) {
  EvalTuple t;
  t.id = j.at("id").get<std::string>();
  t.question = j.at("question").get<std::string>();
  t.answer = j.at("answer").get<std::string>();
  t.ref_ids = j.at("ref_ids").get<std::vector<std::string>>();
  t.topic = TopicId::parse(j.at("topic").get<std::string>());
  if (j.contains("timestamp") && !j["timestamp"].is_null()) {
    t.timestamp = j["timestamp"].get<Instant>();
  }
  for (const auto& e : j.value("entities", nlohmann::json::array())) {
    t.entities.insert(e.get<std::string>());
  }
  t.question_type = j.value("question_type", "");
  if (j.contains("persona_id") && !j["persona_id"].is_null()) {
    t.persona_id = j["persona_id"].get<std::string>();
  }
  t.origin = origin_from_string(j.at("origin").get<std::string>());
  return t;
}

nlohmann::json slice_manifest_json(const BenchmarkSlice& slice) {
  nlohmann::json j;
  j["index"] = slice.index;
  j["kb_version"] = slice.kb_version;
  j["phase_start"] = slice.phase_start;
  if (slice.phase_end) j["phase_end"] = *slice.phase_end;
  if (slice.parent_index) j["parent_index"] = *slice.parent_index;
  j["tuple_count"] = slice.tuples.size();
  return j;
}

BenchmarkSlice slice_from_manifest_json(const nlohmann::json& j) {
  BenchmarkSlice s;
  s.index = j.at("index").get<int>();
  s.kb_version = j.at("kb_version").get<std::string>();
  s.phase_start = j.at("phase_start").get<Instant>();
  if (j.contains("phase_end") && !j["phase_end"].is_null()) {
    s.phase_end = j["phase_end"].get<Instant>();
  }
  if (j.contains("parent_index") && !j["parent_index"].is_null()) {
    s.parent_index = j["parent_index"].get<int>();
  }
  return s;
}

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::config, "cannot open file: " + path.string());
  }
  std::vector<nlohmann::json> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      rows.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::parse, path.string() + ":" + std::to_string(line_no) +
                                        ": invalid JSON line: " + e.what());
    }
  }
  return rows;
}

void write_jsonl(const std::filesystem::path& path,
                 const std::vector<nlohmann::json>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::config, "cannot write file: " + path.string());
  }
  for (const auto& row : rows) {
    out << row.dump() << '\n';
  }
}

std::vector<KnowledgeSnippet> read_snippets_jsonl(const std::filesystem::path& path) {
  std::vector<KnowledgeSnippet> out;
  for (const auto& row : read_jsonl(path)) out.push_back(snippet_from_json(row));
  return out;
}

void write_snippets_jsonl(const std::filesystem::path& path,
                          const std::vector<KnowledgeSnippet>& snippets) {
  std::vector<nlohmann::json> rows;
  rows.reserve(snippets.size());
  for (const auto& s : snippets) rows.push_back(to_json(s));
  write_jsonl(path, rows);
}

std::vector<EvalTuple> read_tuples_jsonl(const std::filesystem::path& path) {
  std::vector<EvalTuple> out;
  for (const auto& row : read_jsonl(path)) out.push_back(tuple_from_json(row));
  return out;
}

void write_tuples_jsonl(const std::filesystem::path& path,
                        const std::vector<EvalTuple>& tuples) {
  std::vector<nlohmann::json> rows;
  rows.reserve(tuples.size());
  for (const auto& t : tuples) rows.push_back(to_json(t));
  write_jsonl(path, rows);
}

}  // namespace chronoplay
