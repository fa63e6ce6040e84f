#include "chronoplay/ingest.hpp"

#include <regex>

namespace chronoplay {

RawDocument raw_document_from_json(const nlohmann::json& j) {
  RawDocument d;
  d.doc_id = j.at("doc_id").get<std::string>();
  d.title = j.value("title", "");
  d.body = j.at("body").get<std::string>();
  if (j.contains("published_at") && !j["published_at"].is_null()) {
    d.published_at = j["published_at"].get<Instant>();
  }
  d.source_kind = source_kind_from_string(j.at("source_kind").get<std::string>());
  d.game_id = j.value("game_id", "");
  if (d.body.empty()) {
    throw Error(ErrorKind::validation, "document " + d.doc_id + " has an empty body");
  }
  return d;
}

nlohmann::json to_json(const RawDocument& doc) {
  nlohmann::json j;
  j["doc_id"] = doc.doc_id;
  j["title"] = doc.title;
  j["body"] = doc.body;
  if (doc.published_at) j["published_at"] = *doc.published_at;
  j["source_kind"] = to_string(doc.source_kind);
  j["game_id"] = doc.game_id;
  return j;
}

std::vector<KnowledgeSnippet> chunk_document(const RawDocument& doc,
                                             const ChunkPolicy& policy) {
  if (policy.max_chars <= policy.overlap_chars) {
    throw Error(ErrorKind::config,
                "chunk policy requires max_chars > overlap_chars >= 0");
  }
  if (doc.body.empty()) {
    throw Error(ErrorKind::config, "cannot chunk empty body: " + doc.doc_id);
  }
  const std::optional<Instant> ts = extract_timestamp(doc);
  std::vector<KnowledgeSnippet> out;
  const std::size_t stride = policy.max_chars - policy.overlap_chars;
  std::size_t start = 0;
  std::size_t index = 0;
  while (true) {
    const std::size_t end = std::min(start + policy.max_chars, doc.body.size());
    KnowledgeSnippet s;
    s.id = doc.doc_id + "#" + std::to_string(index++);
    s.content = doc.body.substr(start, end - start);
    s.timestamp = ts;
    s.source_kind = doc.source_kind;
    s.game_id = doc.game_id;
    out.push_back(std::move(s));
    if (end == doc.body.size()) break;
    start += stride;
  }
  return out;
}

std::optional<Instant> extract_timestamp(const RawDocument& doc) {
  if (doc.published_at) return doc.published_at;
  static const std::regex date_re(R"((\d{4})-(\d{2})-(\d{2}))");
  std::optional<Instant> latest;
  for (auto it = std::sregex_iterator(doc.body.begin(), doc.body.end(), date_re);
       it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    auto parsed = parse_instant(m[0].str());
    if (!parsed) continue;  // out-of-range month/day tokens are not dates
    if (!latest || *parsed > *latest) latest = parsed;
  }
  return latest;
}

std::vector<KnowledgeSnippet> ingest(const std::vector<std::filesystem::path>& paths,
                                     const ChunkPolicy& policy) {
  std::vector<KnowledgeSnippet> out;
  for (const auto& path : paths) {
    for (const auto& row : read_jsonl(path)) {
      RawDocument doc = raw_document_from_json(row);
      if (doc.source_kind == SourceKind::official_update && !extract_timestamp(doc)) {
        throw Error(ErrorKind::validation,
                    "official_update document " + doc.doc_id +
                        " has no resolvable timestamp");
      }
      auto chunks = chunk_document(doc, policy);
      out.insert(out.end(), std::make_move_iterator(chunks.begin()),
                 std::make_move_iterator(chunks.end()));
    }
  }
  return out;
}

}  // namespace chronoplay
