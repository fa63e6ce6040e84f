#include "chronoplay/rag_eval.hpp"

#include <algorithm>
#include <cmath>

namespace chronoplay {

Bm25Index Bm25Index::build(const std::vector<std::pair<std::string, std::string>>& docs,
                           Bm25Params params) {
  if (params.k1 <= 0.0 || params.b < 0.0 || params.b > 1.0) {
    throw Error(ErrorKind::config, "bm25 requires k1 > 0 and b in [0, 1]");
  }
  Bm25Index index;
  index.params_ = params;
  std::set<std::string> seen;
  for (const auto& [id, content] : docs) {
    if (!seen.insert(id).second) {
      throw Error(ErrorKind::validation, "duplicate document id: " + id);
    }
    const std::size_t doc_idx = index.doc_ids_.size();
    index.doc_ids_.push_back(id);
    std::map<std::string, std::size_t> tf;
    std::size_t length = 0;
    for (const auto& token : tokenize(content)) {
      ++tf[token];
      ++length;
    }
    index.doc_lengths_.push_back(length);
    for (const auto& [term, freq] : tf) {
      index.postings_[term].emplace_back(doc_idx, freq);
    }
  }
  std::size_t total = 0;
  for (std::size_t len : index.doc_lengths_) total += len;
  index.avg_doc_length_ = index.doc_ids_.empty()
                              ? 0.0
                              : static_cast<double>(total) /
                                    static_cast<double>(index.doc_ids_.size());
  return index;
}

std::vector<std::pair<std::string, double>> Bm25Index::search(const std::string& query,
                                                              std::size_t k) const {
  if (doc_ids_.empty()) {
    throw Error(ErrorKind::retrieval, "bm25 search over an empty index");
  }
  // Distinct query terms in sorted order so score accumulation order is
  // reproducible (and bit-identical to a per-document evaluation).
  std::vector<std::string> terms = tokenize(query);
  std::sort(terms.begin(), terms.end());
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
  if (terms.empty()) return {};

  const double n_docs = static_cast<double>(doc_ids_.size());
  std::map<std::size_t, double> scores;  // doc idx -> accumulated score
  for (const auto& term : terms) {
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    const double df = static_cast<double>(it->second.size());
    const double idf = std::log((n_docs - df + 0.5) / (df + 0.5) + 1.0);
    for (const auto& [doc_idx, freq] : it->second) {
      const double f = static_cast<double>(freq);
      const double norm =
          params_.k1 * (1.0 - params_.b +
                        params_.b * static_cast<double>(doc_lengths_[doc_idx]) /
                            avg_doc_length_);
      scores[doc_idx] += idf * f * (params_.k1 + 1.0) / (f + norm);
    }
  }
  std::vector<std::pair<std::string, double>> ranked;
  ranked.reserve(scores.size());
  for (const auto& [doc_idx, score] : scores) {
    if (score > 0.0) ranked.emplace_back(doc_ids_[doc_idx], score);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

void VectorIndex::add(std::string id, Embedding embedding) {
  ids_.push_back(std::move(id));
  embeddings_.push_back(std::move(embedding));
}

VectorIndex VectorIndex::build(const std::vector<KnowledgeSnippet>& snippets,
                               EmbeddingProvider& embedder) {
  VectorIndex index;
  for (const auto& s : snippets) index.add(s.id, embedder.embed(s.content));
  return index;
}

std::vector<std::pair<std::string, double>> VectorIndex::top_k(const Embedding& query,
                                                               std::size_t k) const {
  if (ids_.empty()) {
    throw Error(ErrorKind::retrieval, "dense search over an empty index");
  }
  std::vector<std::pair<std::string, double>> ranked;
  ranked.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    ranked.emplace_back(ids_[i], cosine_similarity(query, embeddings_[i]));
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

std::vector<std::string> dense_search(const VectorIndex& index,
                                      EmbeddingProvider& embedder,
                                      const std::string& query, std::size_t k) {
  std::vector<std::string> ids;
  for (const auto& [id, sim] : index.top_k(embedder.embed(query), k)) {
    ids.push_back(id);
  }
  return ids;
}

RetrievalMetrics retrieval_metrics(const RetrievalRun& run, std::size_t k) {
  if (run.gold_ids.empty()) {
    throw Error(ErrorKind::contract, "retrieval_metrics: empty gold set");
  }
  if (k == 0) {
    throw Error(ErrorKind::contract, "retrieval_metrics: k must be >= 1");
  }
  const std::size_t cutoff = std::min(k, run.ranked_ids.size());
  std::size_t hits = 0;
  double dcg = 0.0;
  for (std::size_t i = 0; i < cutoff; ++i) {
    if (run.gold_ids.count(run.ranked_ids[i])) {
      ++hits;
      dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    }
  }
  RetrievalMetrics m;
  m.recall = static_cast<double>(hits) / static_cast<double>(run.gold_ids.size());
  m.precision = static_cast<double>(hits) / static_cast<double>(k);
  m.f1 = (m.precision + m.recall) > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  double idcg = 0.0;
  const std::size_t ideal = std::min(k, run.gold_ids.size());
  for (std::size_t i = 0; i < ideal; ++i) {
    idcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  }
  m.ndcg = idcg > 0.0 ? dcg / idcg : 0.0;
  return m;
}

PhaseEval evaluate_phase(const BenchmarkSlice& slice, const RetrieverFn& retriever,
                         std::size_t k, int jobs) {
  PhaseEval eval;
  const std::size_t n = slice.tuples.size();
  std::vector<std::optional<RetrievalMetrics>> per_tuple(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    const EvalTuple& t = slice.tuples[i];
    try {
      RetrievalRun run;
      run.query_id = t.id;
      run.ranked_ids = retriever(t.question, k);
      run.gold_ids.insert(t.ref_ids.begin(), t.ref_ids.end());
      per_tuple[i] = retrieval_metrics(run, k);
    } catch (const Error&) {
      per_tuple[i] = std::nullopt;  // recorded, excluded from means
    }
  });
  RetrievalMetrics sum;
  std::map<TopicId, RetrievalMetrics> topic_sums;
  for (std::size_t i = 0; i < n; ++i) {
    if (!per_tuple[i]) {
      ++eval.failed;
      continue;
    }
    const RetrievalMetrics& m = *per_tuple[i];
    ++eval.evaluated;
    sum.recall += m.recall;
    sum.precision += m.precision;
    sum.f1 += m.f1;
    sum.ndcg += m.ndcg;
    auto& row = eval.per_topic[slice.tuples[i].topic];
    ++row.tuple_count;
    auto& ts = topic_sums[slice.tuples[i].topic];
    ts.recall += m.recall;
    ts.precision += m.precision;
    ts.f1 += m.f1;
    ts.ndcg += m.ndcg;
  }
  if (eval.evaluated > 0) {
    const double d = static_cast<double>(eval.evaluated);
    eval.mean = {sum.recall / d, sum.precision / d, sum.f1 / d, sum.ndcg / d};
  }
  for (auto& [topic, row] : eval.per_topic) {
    const double d = static_cast<double>(row.tuple_count);
    const RetrievalMetrics& ts = topic_sums[topic];
    row.mean = {ts.recall / d, ts.precision / d, ts.f1 / d, ts.ndcg / d};
  }
  return eval;
}

nlohmann::json to_json(const RetrievalMetrics& m) {
  return nlohmann::json{
      {"recall", m.recall}, {"precision", m.precision}, {"f1", m.f1}, {"ndcg", m.ndcg}};
}

nlohmann::json to_json(const PhaseEval& e) {
  nlohmann::json j;
  j["evaluated"] = e.evaluated;
  j["failed"] = e.failed;
  j["mean"] = to_json(e.mean);
  nlohmann::json topics = nlohmann::json::object();
  for (const auto& [topic, row] : e.per_topic) {
    topics[topic.render()] =
        nlohmann::json{{"tuples", row.tuple_count}, {"mean", to_json(row.mean)}};
  }
  j["per_topic"] = topics;
  return j;
}

}  // namespace chronoplay
