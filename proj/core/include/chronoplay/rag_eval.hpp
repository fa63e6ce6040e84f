#pragma once
// Retrieval backends (Okapi BM25 over an inverted index, exact dense cosine)
// and the Recall@K / F1@K / NDCG@K metric suite with per-phase runners.

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "chronoplay/model.hpp"
#include "chronoplay/providers.hpp"

namespace chronoplay {

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

class Bm25Index {
public:
  static Bm25Index build(const std::vector<std::pair<std::string, std::string>>& docs,
                         Bm25Params params = {});

  // Ranked (id, score) by score descending, id ascending on ties; documents
  // with zero score are excluded; at most k results.
  std::vector<std::pair<std::string, double>> search(const std::string& query,
                                                     std::size_t k) const;

  std::size_t size() const { return doc_ids_.size(); }

private:
  Bm25Params params_;
  std::vector<std::string> doc_ids_;
  std::vector<std::size_t> doc_lengths_;
  double avg_doc_length_ = 0.0;
  // term -> (doc index, term frequency), doc indices ascending
  std::map<std::string, std::vector<std::pair<std::size_t, std::size_t>>> postings_;
};

// Exact cosine top-k over stored embeddings.
class VectorIndex {
public:
  void add(std::string id, Embedding embedding);
  static VectorIndex build(const std::vector<KnowledgeSnippet>& snippets,
                           EmbeddingProvider& embedder);

  // Ranked (id, similarity) by similarity descending, id ascending on ties.
  std::vector<std::pair<std::string, double>> top_k(const Embedding& query,
                                                    std::size_t k) const;
  bool empty() const { return ids_.empty(); }
  std::size_t size() const { return ids_.size(); }

private:
  std::vector<std::string> ids_;
  std::vector<Embedding> embeddings_;
};

std::vector<std::string> dense_search(const VectorIndex& index,
                                      EmbeddingProvider& embedder,
                                      const std::string& query, std::size_t k);

struct RetrievalRun {
  std::string query_id;
  std::vector<std::string> ranked_ids;
  std::set<std::string> gold_ids;
};

struct RetrievalMetrics {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  double ndcg = 0.0;
};

// Binary-gain metrics at cutoff k; IDCG truncates at min(k, |gold|).
// Empty gold is a contract error.
RetrievalMetrics retrieval_metrics(const RetrievalRun& run, std::size_t k);

using RetrieverFn =
    std::function<std::vector<std::string>(const std::string& query, std::size_t k)>;

struct TopicBreakdownRow {
  std::size_t tuple_count = 0;
  RetrievalMetrics mean;
};

struct PhaseEval {
  std::size_t evaluated = 0;
  std::size_t failed = 0;
  RetrievalMetrics mean;
  std::map<TopicId, TopicBreakdownRow> per_topic;
};

// Per-tuple retrieval with the tuple's question as the query; means over the
// slice plus a per-topic breakdown. Retrieval errors are recorded and
// excluded from the means.
PhaseEval evaluate_phase(const BenchmarkSlice& slice, const RetrieverFn& retriever,
                         std::size_t k, int jobs = 1);

nlohmann::json to_json(const RetrievalMetrics& m);
nlohmann::json to_json(const PhaseEval& e);

}  // namespace chronoplay
