// Microbenchmarks for the retrieval hot paths: BM25 indexing/search, exact
// dense top-k, and the mock embedding itself.

#include <benchmark/benchmark.h>

#include "chronoplay/providers.hpp"
#include "chronoplay/rag_eval.hpp"

using namespace chronoplay;

namespace {

std::vector<std::pair<std::string, std::string>> make_corpus(std::size_t docs,
                                                             std::size_t words_per_doc) {
  const auto& words = mock_fixture_words();
  Rng rng(1234);
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(docs);
  for (std::size_t d = 0; d < docs; ++d) {
    std::string content;
    for (std::size_t w = 0; w < words_per_doc; ++w) {
      if (w) content += ' ';
      content += words[rng.bounded(words.size())];
    }
    out.emplace_back("doc" + std::to_string(d), content);
  }
  return out;
}

void BM_Bm25Build(benchmark::State& state) {
  const auto corpus = make_corpus(static_cast<std::size_t>(state.range(0)), 120);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Bm25Index::build(corpus));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Bm25Build)->Arg(200)->Arg(2000);

void BM_Bm25Search(benchmark::State& state) {
  const auto corpus = make_corpus(static_cast<std::size_t>(state.range(0)), 120);
  const auto index = Bm25Index::build(corpus);
  const std::string query = "stamina crossbow parkour safehouse";
  for (auto _ : state) {
    benchmark::DoNotOptimize(index.search(query, 10));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Bm25Search)->Arg(200)->Arg(2000)->Arg(20000);

void BM_DenseTopK(benchmark::State& state) {
  MockEmbeddingProvider embedder(64);
  const auto corpus = make_corpus(static_cast<std::size_t>(state.range(0)), 40);
  VectorIndex index;
  for (const auto& [id, content] : corpus) index.add(id, embedder.embed(content));
  const Embedding query = embedder.embed("stamina crossbow parkour safehouse");
  for (auto _ : state) {
    benchmark::DoNotOptimize(index.top_k(query, 10));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DenseTopK)->Arg(200)->Arg(2000)->Arg(20000);

void BM_MockEmbed(benchmark::State& state) {
  MockEmbeddingProvider embedder(64);
  const auto corpus = make_corpus(1, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(embedder.embed(corpus[0].second));
  }
  state.SetBytesProcessed(state.iterations() *
                          static_cast<std::int64_t>(corpus[0].second.size()));
}
BENCHMARK(BM_MockEmbed)->Arg(32)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
