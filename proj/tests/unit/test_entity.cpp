#include "doctest.h"

#include "chronoplay/entity.hpp"
#include "support/fixtures.hpp"

using namespace chronoplay;

TEST_CASE("entity normalization") {
  CHECK(normalize_entity("  Harran   City ") == "harran city");
  CHECK(normalize_entity("RTX 4070") == "rtx 4070");
  CHECK_THROWS_AS((void)normalize_entity("   "), Error);
}

TEST_CASE("dictionary extraction matches whole words only") {
  std::vector<EntityId> gazetteer = {"night runner", "volatile", "uv flashlight"};
  CHECK(extract_entities_dictionary("The Night Runner outfit", gazetteer) ==
        std::set<EntityId>{"night runner"});
  CHECK(extract_entities_dictionary("volatiles spawn at night", gazetteer).empty());
  CHECK(extract_entities_dictionary("Grab the UV Flashlight; volatile ahead", gazetteer) ==
        std::set<EntityId>{"uv flashlight", "volatile"});
}

TEST_CASE("self-ICL extraction runs three stages against the mock") {
  MockCompletionProvider provider(3);
  PromptLibrary prompts(fixtures::assets_dir() / "prompts");
  NerConfig config;
  config.pseudo_examples = 3;
  config.entity_descriptor = prompts.get("ner/entity_types");

  auto entities = extract_entities_self_icl(
      "The Night Runner outfit sells near Harran City for 500 coins.", provider, prompts,
      config);
  CHECK(entities == std::set<EntityId>{"night runner", "harran city"});

  // Deterministic across calls.
  auto again = extract_entities_self_icl(
      "The Night Runner outfit sells near Harran City for 500 coins.", provider, prompts,
      config);
  CHECK(again == entities);

  // Numeric continuation: model names keep their digits.
  auto hw = extract_entities_self_icl("Will an RTX 4070 hit 60fps?", provider, prompts,
                                      config);
  CHECK(hw.count("rtx 4070") == 1);
}

TEST_CASE("inverted index construction and lookup") {
  auto index = EntityIndex::build({{"t1", {"a"}}, {"t2", {"a", "b"}}},
                                  EntityIndex::ItemKind::tuple);
  CHECK(index.by_entity().at("a") == std::set<std::string>{"t1", "t2"});
  CHECK(index.by_entity().at("b") == std::set<std::string>{"t2"});

  CHECK(index.lookup_affected({"a", "z"}) == std::set<std::string>{"t1", "t2"});
  CHECK(index.lookup_affected({"z"}).empty());
  CHECK(index.lookup_affected({}).empty());

  auto empty = EntityIndex::build({}, EntityIndex::ItemKind::snippet);
  CHECK(empty.by_entity().empty());

  CHECK_THROWS_AS((void)EntityIndex::build({{"t1", {"a"}}, {"t1", {"b"}}},
                                           EntityIndex::ItemKind::tuple),
                  Error);
}

TEST_CASE("lookup_affected equals brute-force intersection on random data") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::pair<std::string, std::set<EntityId>>> items;
    for (int i = 0; i < 60; ++i) {
      std::set<EntityId> entities;
      for (std::size_t e = 0; e < rng.bounded(5); ++e) {
        entities.insert("e" + std::to_string(rng.bounded(25)));
      }
      items.emplace_back("item" + std::to_string(i), entities);
    }
    auto index = EntityIndex::build(items, EntityIndex::ItemKind::tuple);
    std::set<EntityId> update;
    for (std::size_t e = 0; e < rng.bounded(6); ++e) {
      update.insert("e" + std::to_string(rng.bounded(25)));
    }
    std::set<std::string> brute;
    for (const auto& [id, entities] : items) {
      for (const auto& e : update) {
        if (entities.count(e)) {
          brute.insert(id);
          break;
        }
      }
    }
    CHECK(index.lookup_affected(update) == brute);

    // Rebuild gives identical answers.
    auto rebuilt = EntityIndex::build(items, EntityIndex::ItemKind::tuple);
    CHECK(rebuilt.lookup_affected(update) == brute);
  }
}
