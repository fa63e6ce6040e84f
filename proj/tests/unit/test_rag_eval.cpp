#include "doctest.h"

#include "chronoplay/rag_eval.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace chronoplay;
using fixtures::snippet;
using fixtures::tuple_for;

namespace {

const TopicId kA{"GAME_CONTENT", "PROGRESS_GUIDE"};
const TopicId kB{"AFTER_SALES_SERVICE", "REFUND_POLICY"};

}  // namespace

TEST_CASE("bm25 worked example: term frequency beats shared length") {
  auto index = Bm25Index::build(
      {{"d1", "apple banana"}, {"d2", "apple apple"}, {"d3", "cherry"}});
  auto ranked = index.search("apple", 10);
  REQUIRE(ranked.size() == 2);
  CHECK(ranked[0].first == "d2");
  CHECK(ranked[1].first == "d1");

  auto cherry = index.search("cherry", 10);
  REQUIRE(cherry.size() == 1);
  CHECK(cherry[0].first == "d3");

  CHECK(index.search("zzz", 10).empty());
  CHECK(index.search("...", 10).empty());
}

TEST_CASE("bm25 inverted index equals brute-force formula evaluation exactly") {
  Rng rng(404);
  const std::vector<std::string> vocab = {
      "apple", "banana", "cherry", "durian", "elder", "fig",   "grape",
      "melon", "nectar", "olive",  "peach",  "quince", "rasp", "sloe"};
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::pair<std::string, std::string>> docs;
    const std::size_t n_docs = 20 + rng.bounded(181);  // up to 200
    for (std::size_t d = 0; d < n_docs; ++d) {
      std::string content;
      const std::size_t len = 1 + rng.bounded(30);
      for (std::size_t w = 0; w < len; ++w) {
        if (w) content += ' ';
        content += vocab[rng.bounded(vocab.size())];
      }
      docs.emplace_back("doc" + std::to_string(d), content);
    }
    auto index = Bm25Index::build(docs);
    for (int q = 0; q < 8; ++q) {
      std::string query;
      const std::size_t qlen = 1 + rng.bounded(4);
      for (std::size_t w = 0; w < qlen; ++w) {
        if (w) query += ' ';
        query += vocab[rng.bounded(vocab.size())];
      }
      auto got = index.search(query, 25);
      auto want = oracles::bm25_bruteforce(docs, query, 25);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].first == want[i].first);
        CHECK(got[i].second == want[i].second);  // bit-exact
      }
    }
  }
}

TEST_CASE("dense search equals brute-force cosine ranking") {
  MockEmbeddingProvider embedder(32);
  Rng rng(88);
  const auto& words = mock_fixture_words();
  std::vector<KnowledgeSnippet> snippets;
  for (int i = 0; i < 120; ++i) {
    std::string content;
    for (std::size_t w = 0; w < 1 + rng.bounded(8); ++w) {
      if (w) content += ' ';
      content += words[rng.bounded(words.size())];
    }
    snippets.push_back(snippet("s" + std::to_string(i), content));
  }
  auto index = VectorIndex::build(snippets, embedder);
  for (int q = 0; q < 10; ++q) {
    std::string query = words[rng.bounded(words.size())];
    query += " " + words[rng.bounded(words.size())];
    auto got = dense_search(index, embedder, query, 15);

    Embedding qe = embedder.embed(query);
    std::vector<std::pair<std::string, double>> brute;
    for (const auto& s : snippets) {
      brute.emplace_back(s.id, cosine_similarity(qe, embedder.embed(s.content)));
    }
    std::sort(brute.begin(), brute.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    REQUIRE(got.size() == 15);
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == brute[i].first);
  }

  SUBCASE("ties break by id ascending") {
    std::vector<KnowledgeSnippet> twins = {snippet("b", "same words"),
                                           snippet("a", "same words")};
    auto twin_index = VectorIndex::build(twins, embedder);
    auto ranked = dense_search(twin_index, embedder, "same words", 2);
    CHECK(ranked == std::vector<std::string>{"a", "b"});
  }
  SUBCASE("k larger than the corpus returns the full ranking") {
    CHECK(dense_search(index, embedder, "stamina", 1000).size() == snippets.size());
  }
  SUBCASE("empty index is a retrieval error") {
    VectorIndex empty;
    CHECK_THROWS_AS((void)empty.top_k(embedder.embed("x"), 3), Error);
  }
}

TEST_CASE("retrieval metrics match the frozen worked example") {
  RetrievalRun run;
  run.query_id = "q";
  run.ranked_ids = {"d1", "d3", "d2"};
  run.gold_ids = {"d1", "d2"};
  auto m = retrieval_metrics(run, 3);
  CHECK(m.recall == doctest::Approx(1.0));
  CHECK(m.precision == doctest::Approx(2.0 / 3.0).epsilon(1e-4));
  CHECK(m.f1 == doctest::Approx(0.8).epsilon(1e-4));
  CHECK(m.ndcg == doctest::Approx(0.9197207891481876).epsilon(1e-4));

  SUBCASE("perfect run scores 1 everywhere") {
    RetrievalRun perfect{"q", {"d1", "d2"}, {"d1", "d2"}};
    auto pm = retrieval_metrics(perfect, 2);
    CHECK(pm.recall == 1.0);
    CHECK(pm.precision == 1.0);
    CHECK(pm.f1 == doctest::Approx(1.0));
    CHECK(pm.ndcg == doctest::Approx(1.0));
  }
  SUBCASE("no hits scores 0 everywhere") {
    RetrievalRun miss{"q", {"x", "y", "z"}, {"d1"}};
    auto mm = retrieval_metrics(miss, 3);
    CHECK(mm.recall == 0.0);
    CHECK(mm.precision == 0.0);
    CHECK(mm.f1 == 0.0);
    CHECK(mm.ndcg == 0.0);
  }
  SUBCASE("empty gold is a contract error") {
    RetrievalRun bad{"q", {"d1"}, {}};
    CHECK_THROWS_AS((void)retrieval_metrics(bad, 3), Error);
  }
}

TEST_CASE("metric invariants over random runs") {
  Rng rng(777);
  for (int trial = 0; trial < 100; ++trial) {
    RetrievalRun run;
    run.query_id = "q";
    const std::size_t n = 1 + rng.bounded(12);
    for (std::size_t i = 0; i < n; ++i) run.ranked_ids.push_back("d" + std::to_string(i));
    const std::size_t gold_n = 1 + rng.bounded(6);
    for (std::size_t i = 0; i < gold_n; ++i) {
      run.gold_ids.insert("d" + std::to_string(rng.bounded(16)));
    }
    double prev_recall = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      auto m = retrieval_metrics(run, k);
      CHECK(m.recall >= 0.0);
      CHECK(m.recall <= 1.0);
      CHECK(m.precision <= 1.0);
      CHECK(m.f1 <= 1.0);
      CHECK(m.ndcg <= 1.0 + 1e-12);
      CHECK(m.recall >= prev_recall - 1e-12);  // monotone in k
      prev_recall = m.recall;
    }
  }
}

TEST_CASE("evaluate_phase aggregates, groups by topic, and records failures") {
  auto s1 = snippet("s1", "harran city routes");
  auto s2 = snippet("s2", "refund policy steps");
  auto kb = KnowledgeBase::from_snippets({s1, s2});

  BenchmarkSlice slice;
  slice.kb_version = kb.version();
  slice.tuples.push_back(tuple_for({s1}, kA, "q one", "a"));
  slice.tuples.push_back(tuple_for({s1}, kA, "q two", "a"));
  slice.tuples.push_back(tuple_for({s2}, kB, "q three", "a"));

  SUBCASE("single tuple aggregate equals its own metrics") {
    BenchmarkSlice one;
    one.kb_version = kb.version();
    one.tuples.push_back(slice.tuples[0]);
    RetrieverFn hit = [](const std::string&, std::size_t) {
      return std::vector<std::string>{"s1"};
    };
    auto eval = evaluate_phase(one, hit, 1);
    CHECK(eval.evaluated == 1);
    CHECK(eval.mean.recall == 1.0);
    CHECK(eval.mean.ndcg == 1.0);
  }
  SUBCASE("half hits mean 0.5") {
    RetrieverFn first_only = [](const std::string& q, std::size_t) {
      if (q == "q one" || q == "q three") return std::vector<std::string>{"s1"};
      return std::vector<std::string>{"s2"};
    };
    // q one: gold s1 hit; q two: gold s1 miss; q three: gold s2 miss (s1).
    BenchmarkSlice two;
    two.kb_version = kb.version();
    two.tuples = {slice.tuples[0], slice.tuples[1]};
    auto eval = evaluate_phase(two, first_only, 1);
    CHECK(eval.mean.recall == doctest::Approx(0.5));
  }
  SUBCASE("per-topic breakdown has one row per topic") {
    RetrieverFn hit = [](const std::string&, std::size_t) {
      return std::vector<std::string>{"s1"};
    };
    auto eval = evaluate_phase(slice, hit, 1);
    CHECK(eval.per_topic.size() == 2);
    CHECK(eval.per_topic.at(kA).tuple_count == 2);
    CHECK(eval.per_topic.at(kB).tuple_count == 1);
  }
  SUBCASE("retriever errors are excluded from means and counted") {
    RetrieverFn flaky = [](const std::string& q, std::size_t) -> std::vector<std::string> {
      if (q == "q two") throw Error(ErrorKind::retrieval, "boom");
      return {"s1"};
    };
    auto eval = evaluate_phase(slice, flaky, 1);
    CHECK(eval.failed == 1);
    CHECK(eval.evaluated == 2);
  }
  SUBCASE("parallel evaluation matches sequential") {
    RetrieverFn hit = [](const std::string&, std::size_t) {
      return std::vector<std::string>{"s1"};
    };
    auto seq = evaluate_phase(slice, hit, 1, 1);
    auto par = evaluate_phase(slice, hit, 1, 4);
    CHECK(seq.mean.recall == par.mean.recall);
    CHECK(seq.mean.ndcg == par.mean.ndcg);
  }
}
