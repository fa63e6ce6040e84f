#include "chronoplay/providers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#define CPPHTTPLIB_NO_EXCEPTIONS_FALLBACK
#include "httplib.h"

namespace chronoplay {

double Embedding::norm() const {
  double sum = 0.0;
  for (double v : values) sum += v * v;
  return std::sqrt(sum);
}

double cosine_similarity(const Embedding& a, const Embedding& b) {
  if (a.dimension() != b.dimension()) {
    throw Error(ErrorKind::contract, "cosine_similarity: dimension mismatch");
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) dot += a.values[i] * b.values[i];
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  // Clamp away rounding overshoot so the declared [-1, 1] range holds.
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

nlohmann::json complete_json(CompletionProvider& provider, CompletionRequest request,
                             int attempts) {
  request.expect = ExpectKind::json_object;
  std::string raw;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    raw = provider.complete(request);
    nlohmann::json parsed = nlohmann::json::parse(raw, nullptr, false);
    if (!parsed.is_discarded() && parsed.is_object()) return parsed;
  }
  throw Error(ErrorKind::parse,
              "provider output is not a JSON object after " +
                  std::to_string(attempts) + " attempts; raw text: " + raw);
}

Embedding MockEmbeddingProvider::embed(std::string_view text) {
  if (trim(text).empty()) {
    throw Error(ErrorKind::contract, "embed: empty text");
  }
  Embedding e;
  e.values.assign(dim_, 0.0);
  bool any = false;
  for (const auto& token : tokenize(text)) {
    e.values[token_bucket(token, dim_)] += 1.0;
    any = true;
  }
  if (!any) {
    e.values[0] = 1.0;
    return e;
  }
  const double n = e.norm();
  for (double& v : e.values) v /= n;
  return e;
}

std::size_t MockEmbeddingProvider::token_bucket(std::string_view token, std::size_t dim) {
  return static_cast<std::size_t>(fnv1a64(token) % dim);
}

namespace {

std::string join_url(const std::string& endpoint, const std::string& path) {
  if (!endpoint.empty() && endpoint.back() == '/') {
    return endpoint.substr(0, endpoint.size() - 1) + path;
  }
  return endpoint + path;
}

// Splits "http://host:port/base" into client origin and base path.
std::pair<std::string, std::string> split_origin(const std::string& url) {
  auto scheme_end = url.find("://");
  std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  auto path_start = url.find('/', host_start);
  if (path_start == std::string::npos) return {url, ""};
  return {url.substr(0, path_start), url.substr(path_start)};
}

nlohmann::json post_with_retries(const RemoteProviderConfig& config,
                                 const std::string& path, const nlohmann::json& body) {
  if (config.endpoint.empty()) {
    throw Error(ErrorKind::config,
                "remote provider endpoint is not configured (see CHRONO_* env vars)");
  }
  auto [origin, base_path] = split_origin(config.endpoint);
  std::string full_path = join_url(base_path, path);
  std::string last_error;
  int backoff = config.backoff_ms;
  for (int attempt = 1; attempt <= config.max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
    }
    httplib::Client client(origin);
    client.set_connection_timeout(10);
    client.set_read_timeout(120);
    httplib::Headers headers;
    if (!config.api_key.empty()) {
      headers.emplace("Authorization", "Bearer " + config.api_key);
    }
    auto res = client.Post(full_path, headers, body.dump(), "application/json");
    if (!res) {
      last_error = "transport failure: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "server returned status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw Error(ErrorKind::provider, "remote provider rejected request (status " +
                                           std::to_string(res->status) +
                                           "): " + res->body);
    }
    nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) {
      last_error = "response body is not JSON";
      continue;
    }
    return parsed;
  }
  throw Error(ErrorKind::provider, "remote provider failed after " +
                                       std::to_string(config.max_attempts) +
                                       " attempts: " + last_error);
}

}  // namespace

std::string RemoteCompletionProvider::complete(const CompletionRequest& request) {
  nlohmann::json body;
  body["model"] = config_.model;
  body["temperature"] = request.temperature;
  if (request.seed) body["seed"] = *request.seed;
  body["messages"] = nlohmann::json::array({
      nlohmann::json{{"role", "system"}, {"content", request.system_prompt}},
      nlohmann::json{{"role", "user"}, {"content", request.user_prompt}},
  });
  if (request.expect == ExpectKind::json_object) {
    body["response_format"] = nlohmann::json{{"type", "json_object"}};
  }
  nlohmann::json response = post_with_retries(config_, "/v1/chat/completions", body);
  try {
    return response.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::provider,
                std::string("unexpected chat-completions response shape: ") + e.what());
  }
}

Embedding RemoteEmbeddingProvider::embed(std::string_view text) {
  if (trim(text).empty()) {
    throw Error(ErrorKind::contract, "embed: empty text");
  }
  nlohmann::json body;
  body["model"] = config_.model;
  body["input"] = nlohmann::json::array({std::string(text)});
  nlohmann::json response = post_with_retries(config_, "/v1/embeddings", body);
  Embedding e;
  try {
    for (const auto& v : response.at("data").at(0).at("embedding")) {
      e.values.push_back(v.get<double>());
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::provider,
                std::string("unexpected embeddings response shape: ") + ex.what());
  }
  if (e.dimension() != dim_) {
    throw Error(ErrorKind::provider,
                "embedding dimension " + std::to_string(e.dimension()) +
                    " differs from configured " + std::to_string(dim_));
  }
  return e;
}

}  // namespace chronoplay
