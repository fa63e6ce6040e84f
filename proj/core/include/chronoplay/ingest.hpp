#pragma once
// Corpus ingestion: pre-collected documents (wiki exports, official update
// posts) become knowledge snippets via character chunking with overlap.

#include <filesystem>
#include <optional>
#include <vector>

#include "chronoplay/model.hpp"

namespace chronoplay {

struct RawDocument {
  std::string doc_id;
  std::string title;
  std::string body;
  std::optional<Instant> published_at;
  SourceKind source_kind = SourceKind::wiki;
  std::string game_id;
};

RawDocument raw_document_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RawDocument& doc);

struct ChunkPolicy {
  std::size_t max_chars = 1200;
  std::size_t overlap_chars = 120;
};

// Snippets cover the body in order, adjacent chunks overlapping by
// overlap_chars; ids are doc_id#chunk_index. Entities start empty.
std::vector<KnowledgeSnippet> chunk_document(const RawDocument& doc,
                                             const ChunkPolicy& policy);

// published_at when present; otherwise the latest YYYY-MM-DD token found in
// the body; absent when neither exists.
std::optional<Instant> extract_timestamp(const RawDocument& doc);

// Reads RawDocument JSON-lines files in the given order and chunks each
// document. official_update documents without a resolvable timestamp are
// rejected.
std::vector<KnowledgeSnippet> ingest(const std::vector<std::filesystem::path>& paths,
                                     const ChunkPolicy& policy);

}  // namespace chronoplay
