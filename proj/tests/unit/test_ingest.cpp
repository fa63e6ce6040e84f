#include "doctest.h"

#include "chronoplay/ingest.hpp"
#include "support/fixtures.hpp"

using namespace chronoplay;

namespace {

RawDocument doc(const std::string& id, const std::string& body,
                SourceKind kind = SourceKind::wiki,
                std::optional<Instant> published = std::nullopt) {
  RawDocument d;
  d.doc_id = id;
  d.title = "t";
  d.body = body;
  d.published_at = published;
  d.source_kind = kind;
  d.game_id = "testgame";
  return d;
}

}  // namespace

TEST_CASE("chunking covers the body with the stated stride") {
  SUBCASE("single chunk when the body fits") {
    auto chunks = chunk_document(doc("d", "0123456789"), {10, 0});
    REQUIRE(chunks.size() == 1);
    CHECK(chunks[0].id == "d#0");
    CHECK(chunks[0].content == "0123456789");
  }
  SUBCASE("overlapping windows step by max minus overlap") {
    auto chunks = chunk_document(doc("d", "0123456789"), {6, 2});
    REQUIRE(chunks.size() == 2);
    CHECK(chunks[0].content == "012345");  // [0, 6)
    CHECK(chunks[1].content == "456789");  // [4, 10)
  }
  SUBCASE("policy violations are config errors") {
    CHECK_THROWS_AS((void)chunk_document(doc("d", "abc"), {2, 2}), Error);
    RawDocument empty = doc("d", "x");
    empty.body = "";
    CHECK_THROWS_AS((void)chunk_document(empty, {10, 0}), Error);
  }
  SUBCASE("chunks inherit timestamp and source kind") {
    auto chunks =
        chunk_document(doc("d", "abcdef", SourceKind::official_update, 1700000000), {4, 1});
    for (const auto& c : chunks) {
      CHECK(c.timestamp == 1700000000);
      CHECK(c.source_kind == SourceKind::official_update);
      CHECK(c.entities.empty());
    }
  }
}

TEST_CASE("dropping overlaps reassembles the original body") {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    std::string body;
    const std::size_t len = 1 + rng.bounded(400);
    for (std::size_t i = 0; i < len; ++i) {
      body.push_back(static_cast<char>('a' + rng.bounded(26)));
    }
    const std::size_t max_chars = 2 + rng.bounded(50);
    const std::size_t overlap = rng.bounded(max_chars);
    auto chunks = chunk_document(doc("d", body), {max_chars, overlap});
    std::string rebuilt = chunks[0].content;
    for (std::size_t i = 1; i < chunks.size(); ++i) {
      rebuilt += chunks[i].content.substr(overlap);
    }
    CHECK(rebuilt == body);
  }
}

TEST_CASE("timestamp extraction prefers published_at, else the latest date") {
  CHECK(extract_timestamp(doc("d", "x", SourceKind::wiki, 1700000000)) == 1700000000);
  CHECK(extract_timestamp(doc("d", "patch on 2024-01-05 then fixed 2024-03-01")) ==
        parse_instant("2024-03-01"));
  CHECK(extract_timestamp(doc("d", "no dates anywhere")) == std::nullopt);
  CHECK(extract_timestamp(doc("d", "bogus 2024-13-99 only")) == std::nullopt);
}

TEST_CASE("ingest assigns doc_id#chunk ids and validates update docs") {
  fixtures::TempDir dir;
  auto path = dir.path() / "docs.jsonl";
  fixtures::write_file(path, to_json(doc("docA", "alpha body")).dump() + "\n" +
                                 to_json(doc("docB", "beta body")).dump() + "\n");
  auto snippets = ingest({path}, {100, 10});
  REQUIRE(snippets.size() == 2);
  CHECK(snippets[0].id == "docA#0");
  CHECK(snippets[1].id == "docB#0");

  CHECK(ingest({path}, {100, 10}).size() == snippets.size());  // deterministic

  auto bad = dir.path() / "bad.jsonl";
  fixtures::write_file(
      bad, to_json(doc("upd", "no date here", SourceKind::official_update)).dump() + "\n");
  CHECK_THROWS_AS((void)ingest({bad}, {100, 10}), Error);

  auto malformed = dir.path() / "malformed.jsonl";
  fixtures::write_file(malformed, "{broken\n");
  CHECK_THROWS_AS((void)ingest({malformed}, {100, 10}), Error);
}
