#include "doctest.h"

#include "chronoplay/model.hpp"
#include "support/fixtures.hpp"

using namespace chronoplay;
using fixtures::snippet;
using fixtures::tuple_for;

namespace {

const TopicId kTopic{"GAME_CONTENT", "PROGRESS_GUIDE"};

Taxonomy test_taxonomy() { return Taxonomy::load(fixtures::assets_dir() / "taxonomy.json"); }

}  // namespace

TEST_CASE("derive_tuple_timestamp follows the max rule") {
  CHECK(derive_tuple_timestamp({snippet("a", "x", 100), snippet("b", "y", 200),
                                snippet("c", "z")}) == 200);
  CHECK(derive_tuple_timestamp({snippet("a", "x"), snippet("b", "y")}) == std::nullopt);
  CHECK(derive_tuple_timestamp({snippet("a", "x", 50)}) == 50);
  CHECK_THROWS_AS((void)derive_tuple_timestamp({}), Error);
}

TEST_CASE("derive_tuple_entities is the union over references") {
  CHECK(derive_tuple_entities({snippet("a", "x", {}, {"a", "b"}),
                               snippet("b", "y", {}, {"b", "c"})}) ==
        std::set<EntityId>{"a", "b", "c"});
  CHECK(derive_tuple_entities({snippet("a", "x"), snippet("b", "y")}).empty());
  CHECK(derive_tuple_entities({snippet("a", "x", {}, {"x"})}) == std::set<EntityId>{"x"});
  CHECK_THROWS_AS((void)derive_tuple_entities({}), Error);
}

TEST_CASE("tuple ids hash content, not ref order") {
  auto id1 = tuple_content_id("q", "a", {"r1", "r2"});
  auto id2 = tuple_content_id("q", "a", {"r2", "r1"});
  auto id3 = tuple_content_id("q2", "a", {"r1", "r2"});
  CHECK(id1 == id2);
  CHECK(id1 != id3);
}

TEST_CASE("absent timestamps sort before present ones") {
  auto s1 = snippet("s1", "x", 100);
  auto kb_snippets = std::vector<KnowledgeSnippet>{s1};
  EvalTuple with_ts = tuple_for(kb_snippets, kTopic, "q1", "a1");
  EvalTuple no_ts = tuple_for({snippet("s2", "y")}, kTopic, "q2", "a2");
  CHECK(older_than(no_ts, with_ts));
  CHECK(!older_than(with_ts, no_ts));

  EvalTuple a = with_ts;
  EvalTuple b = with_ts;
  a.id = "a";
  b.id = "b";
  CHECK(older_than(a, b));
}

TEST_CASE("knowledge base versions are content addressed") {
  auto kb1 = KnowledgeBase::from_snippets({snippet("a", "x"), snippet("b", "y")});
  auto kb2 = KnowledgeBase::from_snippets({snippet("b", "y"), snippet("a", "x")});
  CHECK(kb1.version() == kb2.version());
  CHECK(kb1.find("a") != nullptr);
  CHECK(kb1.find("zz") == nullptr);

  CHECK_THROWS_AS((void)KnowledgeBase::from_snippets({snippet("a", "x"), snippet("a", "y")}),
                  Error);

  auto grown = kb1.union_with({snippet("c", "z"), snippet("a", "x")});
  CHECK(grown.size() == 3);
  CHECK_THROWS_AS((void)kb1.union_with({snippet("a", "DIFFERENT")}), Error);
}

TEST_CASE("validate_slice reports each broken rule") {
  auto s1 = snippet("s1", "content one", 100, {"harran city"});
  auto s2 = snippet("s2", "content two", 200, {"night runner"});
  auto kb = KnowledgeBase::from_snippets({s1, s2});
  Taxonomy taxonomy = test_taxonomy();

  BenchmarkSlice slice;
  slice.index = 0;
  slice.kb_version = kb.version();
  slice.tuples.push_back(tuple_for({s1, s2}, kTopic, "q", "a"));

  CHECK(validate_slice(slice, kb, &taxonomy).empty());

  SUBCASE("unresolved ref") {
    slice.tuples[0].ref_ids.push_back("missing");
    auto report = validate_slice(slice, kb, &taxonomy);
    REQUIRE(report.size() == 1);
    CHECK(report[0].rule == "unresolved ref");
  }
  SUBCASE("timestamp mismatch") {
    slice.tuples[0].timestamp = 999;
    auto report = validate_slice(slice, kb, &taxonomy);
    REQUIRE(report.size() == 1);
    CHECK(report[0].rule == "timestamp mismatch");
  }
  SUBCASE("entity mismatch") {
    slice.tuples[0].entities.insert("bogus");
    auto report = validate_slice(slice, kb, &taxonomy);
    REQUIRE(report.size() == 1);
    CHECK(report[0].rule == "entity mismatch");
  }
  SUBCASE("unknown topic") {
    slice.tuples[0].topic = TopicId{"NOPE", "NADA"};
    auto report = validate_slice(slice, kb, &taxonomy);
    REQUIRE(report.size() == 1);
    CHECK(report[0].rule == "unknown topic");
  }
  SUBCASE("duplicate tuple id") {
    slice.tuples.push_back(slice.tuples[0]);
    auto report = validate_slice(slice, kb, &taxonomy);
    REQUIRE(report.size() == 1);
    CHECK(report[0].rule == "duplicate id");
  }
  SUBCASE("kb version mismatch throws") {
    slice.kb_version = "kb-bogus";
    CHECK_THROWS_AS((void)validate_slice(slice, kb, &taxonomy), Error);
  }
}

TEST_CASE("accepted slices re-derive their stored fields exactly") {
  Rng rng(99);
  std::vector<KnowledgeSnippet> snippets;
  for (int i = 0; i < 20; ++i) {
    std::set<EntityId> entities;
    for (std::size_t e = 0; e < rng.bounded(4); ++e) {
      entities.insert("entity " + std::to_string(rng.bounded(10)));
    }
    std::optional<Instant> ts;
    if (rng.bounded(2)) ts = static_cast<Instant>(rng.bounded(100000));
    snippets.push_back(
        snippet("s" + std::to_string(i), "content " + std::to_string(i), ts, entities));
  }
  auto kb = KnowledgeBase::from_snippets(snippets);
  BenchmarkSlice slice;
  slice.kb_version = kb.version();
  for (int t = 0; t < 30; ++t) {
    std::vector<KnowledgeSnippet> refs;
    std::set<std::size_t> picked;
    const std::size_t n_refs = 1 + rng.bounded(3);
    while (picked.size() < n_refs) picked.insert(rng.bounded(snippets.size()));
    for (auto idx : picked) refs.push_back(snippets[idx]);
    slice.tuples.push_back(
        tuple_for(refs, kTopic, "q" + std::to_string(t), "a" + std::to_string(t)));
  }
  REQUIRE(validate_slice(slice, kb).empty());
  for (const auto& t : slice.tuples) {
    std::vector<KnowledgeSnippet> refs;
    for (const auto& id : t.ref_ids) refs.push_back(*kb.find(id));
    CHECK(derive_tuple_timestamp(refs) == t.timestamp);
    CHECK(derive_tuple_entities(refs) == t.entities);
  }
}

TEST_CASE("serialization round-trips every core type") {
  Rng rng(123);
  for (int i = 0; i < 50; ++i) {
    std::set<EntityId> entities;
    for (std::size_t e = 0; e < rng.bounded(5); ++e) {
      entities.insert("e" + std::to_string(rng.bounded(20)));
    }
    std::optional<Instant> ts;
    if (rng.bounded(2)) ts = static_cast<Instant>(rng.bounded(1u << 30));
    auto s = snippet("id" + std::to_string(i), "body\nwith newline " + std::to_string(i),
                     ts, entities);
    s.source_kind = rng.bounded(2) ? SourceKind::wiki : SourceKind::official_update;
    auto back = snippet_from_json(to_json(s));
    CHECK(back.id == s.id);
    CHECK(back.content == s.content);
    CHECK(back.timestamp == s.timestamp);
    CHECK(back.entities == s.entities);
    CHECK(back.source_kind == s.source_kind);
    CHECK(back.game_id == s.game_id);

    EvalTuple t = tuple_for({s}, kTopic, "question " + std::to_string(i), "answer");
    if (rng.bounded(2)) t.persona_id = "pers-x";
    t.origin = static_cast<Origin>(rng.bounded(4));
    auto tuple_back = tuple_from_json(to_json(t));
    CHECK(tuple_back.id == t.id);
    CHECK(tuple_back.question == t.question);
    CHECK(tuple_back.answer == t.answer);
    CHECK(tuple_back.ref_ids == t.ref_ids);
    CHECK(tuple_back.topic == t.topic);
    CHECK(tuple_back.timestamp == t.timestamp);
    CHECK(tuple_back.entities == t.entities);
    CHECK(tuple_back.question_type == t.question_type);
    CHECK(tuple_back.persona_id == t.persona_id);
    CHECK(tuple_back.origin == t.origin);
  }

  BenchmarkSlice slice;
  slice.index = 3;
  slice.kb_version = "kb-abc";
  slice.phase_start = 1000;
  slice.phase_end = 2000;
  slice.parent_index = 2;
  auto back = slice_from_manifest_json(slice_manifest_json(slice));
  CHECK(back.index == slice.index);
  CHECK(back.kb_version == slice.kb_version);
  CHECK(back.phase_start == slice.phase_start);
  CHECK(back.phase_end == slice.phase_end);
  CHECK(back.parent_index == slice.parent_index);
}

TEST_CASE("jsonl errors carry the line number") {
  fixtures::TempDir dir;
  fixtures::write_file(dir.path() / "bad.jsonl", "{\"ok\": 1}\nnot json\n");
  try {
    read_jsonl(dir.path() / "bad.jsonl");
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::parse);
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
}
