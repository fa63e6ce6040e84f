#pragma once
// Text-completion and embedding backends behind one interface, plus
// deterministic mock backends for fully offline runs. No other module
// performs network I/O.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "chronoplay/common.hpp"

namespace chronoplay {

enum class ExpectKind { free_text, json_object };

struct CompletionRequest {
  std::string system_prompt;
  std::string user_prompt;
  double temperature = 0.0;
  std::optional<std::uint64_t> seed;
  ExpectKind expect = ExpectKind::free_text;
};

class CompletionProvider {
public:
  virtual ~CompletionProvider() = default;
  virtual std::string complete(const CompletionRequest& request) = 0;
};

struct Embedding {
  std::vector<double> values;

  std::size_t dimension() const { return values.size(); }
  double norm() const;
};

class EmbeddingProvider {
public:
  virtual ~EmbeddingProvider() = default;
  virtual Embedding embed(std::string_view text) = 0;
  virtual std::size_t dimension() const = 0;
};

// dot(a,b)/(|a||b|); 0 when either norm is 0. Dimension mismatch is a
// contract error.
double cosine_similarity(const Embedding& a, const Embedding& b);

// complete() with the json_object expectation enforced: retries up to
// `attempts` times on non-JSON output, then throws a parse error carrying
// the raw text.
nlohmann::json complete_json(CompletionProvider& provider, CompletionRequest request,
                             int attempts = 2);

// Deterministic rule-table mock. Output is a pure function of
// (system_prompt, user_prompt, seed); the rule per task is documented in
// mock_provider.cpp next to its handler.
class MockCompletionProvider : public CompletionProvider {
public:
  explicit MockCompletionProvider(std::uint64_t base_seed = 0)
      : base_seed_(base_seed) {}
  std::string complete(const CompletionRequest& request) override;

private:
  std::uint64_t base_seed_;
};

// Hashed bag-of-tokens embedding: lowercase, split on non-alphanumerics,
// each token FNV-hashed to one of `dim` buckets with +1, then
// L2-normalized. An all-zero vector maps to the unit basis vector at 0.
class MockEmbeddingProvider : public EmbeddingProvider {
public:
  explicit MockEmbeddingProvider(std::size_t dim = 64) : dim_(dim) {}
  Embedding embed(std::string_view text) override;
  std::size_t dimension() const override { return dim_; }

  static std::size_t token_bucket(std::string_view token, std::size_t dim);

private:
  std::size_t dim_;
};

struct RemoteProviderConfig {
  std::string endpoint;   // e.g. http://host:port
  std::string api_key;
  std::string model;
  int max_attempts = 3;
  int backoff_ms = 500;   // doubles per retry
};

// Generic chat-completions client: POST {endpoint}/v1/chat/completions.
class RemoteCompletionProvider : public CompletionProvider {
public:
  explicit RemoteCompletionProvider(RemoteProviderConfig config)
      : config_(std::move(config)) {}
  std::string complete(const CompletionRequest& request) override;

private:
  RemoteProviderConfig config_;
};

// Generic embeddings client: POST {endpoint}/v1/embeddings.
class RemoteEmbeddingProvider : public EmbeddingProvider {
public:
  RemoteEmbeddingProvider(RemoteProviderConfig config, std::size_t dim)
      : config_(std::move(config)), dim_(dim) {}
  Embedding embed(std::string_view text) override;
  std::size_t dimension() const override { return dim_; }

private:
  RemoteProviderConfig config_;
  std::size_t dim_;
};

// Word list the mock uses for seeded placeholder fills.
const std::vector<std::string>& mock_fixture_words();

}  // namespace chronoplay
