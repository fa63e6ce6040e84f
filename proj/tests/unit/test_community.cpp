#include "doctest.h"

#include "chronoplay/community.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace chronoplay;

namespace {

struct CommunityHarness {
  MockCompletionProvider provider{5};
  MockEmbeddingProvider embedder{64};
  Taxonomy taxonomy = Taxonomy::load(fixtures::assets_dir() / "taxonomy.json");
  PromptLibrary prompts{fixtures::assets_dir() / "prompts"};
};

CommunityPost post(const std::string& id, const std::string& text, Instant at = 0) {
  CommunityPost p;
  p.post_id = id;
  p.text = text;
  p.created_at = at;
  p.game_id = "testgame";
  return p;
}

}  // namespace

TEST_CASE("classification validates provider output against the taxonomy") {
  CommunityHarness h;
  auto topic =
      classify_topic(post("p1", "will my gtx 1060 run this"), h.taxonomy, h.provider,
                     h.prompts);
  CHECK(topic.render() == "TECHNICAL_SUPPORT/SYSTEM_REQUIREMENTS");

  auto same = classify_topic(post("p1", "will my gtx 1060 run this"), h.taxonomy,
                             h.provider, h.prompts);
  CHECK(same == topic);

  CHECK_THROWS_AS((void)classify_topic(post("p2", "MOCK_CLASSIFY_INVALID nonsense"),
                                       h.taxonomy, h.provider, h.prompts),
                  Error);
}

TEST_CASE("template extraction enforces placeholder consistency") {
  CommunityHarness h;
  CommunityPost p = post("p1", "what is the best crossbow build for raids");
  p.topic = TopicId{"GAME_CONTENT", "PROGRESS_GUIDE"};

  auto templates = extract_templates(p, h.provider, h.prompts);
  REQUIRE(templates.size() == 2);
  for (const auto& t : templates) {
    CHECK(t.topic == *p.topic);
    auto found = placeholders_in(t.template_text);
    std::vector<std::string> declared = t.placeholders;
    std::sort(found.begin(), found.end());
    std::sort(declared.begin(), declared.end());
    CHECK(found == declared);
  }

  SUBCASE("more than three templates truncate to three") {
    CommunityPost many = p;
    many.text += " MOCK_TEMPLATE_MANY";
    CHECK(extract_templates(many, h.provider, h.prompts).size() == 3);
  }
  SUBCASE("placeholder mismatch is an extraction error") {
    CommunityPost bad = p;
    bad.text += " MOCK_TEMPLATE_BAD";
    CHECK_THROWS_AS((void)extract_templates(bad, h.provider, h.prompts), Error);
  }
  SUBCASE("placeholder-free templates are fine") {
    CommunityPost noph = p;
    noph.text += " MOCK_TEMPLATE_NOPH";
    auto out = extract_templates(noph, h.provider, h.prompts);
    REQUIRE(out.size() == 1);
    CHECK(out[0].placeholders.empty());
  }
  SUBCASE("unclassified post is a contract error") {
    CommunityPost unclassified = post("p9", "text");
    CHECK_THROWS_AS((void)extract_templates(unclassified, h.provider, h.prompts), Error);
  }
}

TEST_CASE("persona extraction applies the null rule and confidence floor") {
  CommunityHarness h;
  auto persona = extract_persona(
      post("p1", "as a longtime stealth player how should I spec for night raids"),
      h.provider, h.prompts, 0.5);
  REQUIRE(persona.has_value());
  CHECK(persona->confidence == doctest::Approx(0.8));
  CHECK(persona->description.rfind("You are a player", 0) == 0);

  CHECK(!extract_persona(post("p2", "short question"), h.provider, h.prompts, 0.5)
             .has_value());

  auto low = extract_persona(
      post("p3", "a long enough question text MOCK_PERSONA_CONF=0.4 for extraction"),
      h.provider, h.prompts, 0.5);
  CHECK(!low.has_value());
}

TEST_CASE("dedup keeps the first of near-duplicates, strict threshold") {
  CommunityHarness h;
  SUBCASE("identical second item drops at 0.7") {
    auto retained = dedup({{"a", "same text"}, {"b", "same text"}}, 0.7, h.embedder);
    CHECK(retained == std::vector<std::string>{"a"});
  }
  SUBCASE("similarity must strictly exceed the threshold") {
    // Identical texts have similarity exactly 1.0, which does not exceed 1.0.
    auto retained = dedup({{"a", "same text"}, {"b", "same text"}}, 1.0, h.embedder);
    CHECK(retained == std::vector<std::string>{"a", "b"});
  }
  SUBCASE("bad threshold is a config error") {
    CHECK_THROWS_AS((void)dedup({{"a", "x"}}, 0.0, h.embedder), Error);
  }
}

TEST_CASE("dedup matches the brute-force greedy retain set and is idempotent") {
  CommunityHarness h;
  Rng rng(31);
  const auto& words = mock_fixture_words();
  std::vector<std::pair<std::string, std::string>> items;
  for (int i = 0; i < 200; ++i) {
    std::string text;
    const std::size_t len = 2 + rng.bounded(6);
    for (std::size_t w = 0; w < len; ++w) {
      if (w) text += ' ';
      text += words[rng.bounded(words.size())];
    }
    items.emplace_back("id" + std::to_string(i), text);
  }
  auto retained = dedup(items, 0.7, h.embedder);

  std::vector<std::vector<double>> vectors;
  for (const auto& [id, text] : items) vectors.push_back(h.embedder.embed(text).values);
  auto expected_idx = oracles::greedy_retain(vectors, 0.7);
  std::vector<std::string> expected;
  for (auto i : expected_idx) expected.push_back(items[i].first);
  CHECK(retained == expected);

  // Output is a subsequence of input.
  std::size_t cursor = 0;
  for (const auto& [id, text] : items) {
    if (cursor < retained.size() && retained[cursor] == id) ++cursor;
  }
  CHECK(cursor == retained.size());

  // Idempotence: dedup over its own output changes nothing.
  std::vector<std::pair<std::string, std::string>> kept_items;
  for (const auto& id : retained) {
    for (const auto& item : items) {
      if (item.first == id) kept_items.push_back(item);
    }
  }
  CHECK(dedup(kept_items, 0.7, h.embedder) == retained);
}

TEST_CASE("mine_assets classifies, extracts, dedups, and honors expert lists") {
  CommunityHarness h;
  std::vector<CommunityPost> posts;
  posts.push_back(post("p1", "will my gtx 1060 run this game at high settings", 100));
  posts.push_back(post("p2", "what is the refund policy if it will not launch", 200));
  posts.push_back(post("p3", "how do I find teammates to play with at night", 300));

  MineOptions options;
  MinedAssets mined =
      mine_assets(posts, h.taxonomy, h.provider, h.embedder, h.prompts, options);
  CHECK(mined.classified_posts.size() == 3);
  CHECK(!mined.templates.empty());
  for (const auto& p : mined.classified_posts) CHECK(p.topic.has_value());

  // Deny one template and re-mine: it disappears.
  options.deny_ids = {mined.templates.front().template_id};
  MinedAssets filtered =
      mine_assets(posts, h.taxonomy, h.provider, h.embedder, h.prompts, options);
  for (const auto& t : filtered.templates) {
    CHECK(t.template_id != options.deny_ids.front());
  }
}
