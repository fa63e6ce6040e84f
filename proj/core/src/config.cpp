#include "chronoplay/config.hpp"

#include <cstdlib>
#include <fstream>

namespace chronoplay {

void RunConfig::validate() const {
  if (deterministic && seed == 0) {
    throw Error(ErrorKind::config, "deterministic runs require a non-zero seed");
  }
  if (!std::filesystem::exists(taxonomy_file())) {
    throw Error(ErrorKind::config, "missing taxonomy asset: " + taxonomy_file().string());
  }
  if (!std::filesystem::is_directory(prompts_dir())) {
    throw Error(ErrorKind::config, "missing prompts directory: " + prompts_dir().string());
  }
  synthesis.validate();
  if (drift.window <= 0 || drift.step <= 0) {
    throw Error(ErrorKind::config, "drift window and step must be positive");
  }
  if (drift.gamma <= 0.0 || drift.lambda_jsd <= 0.0) {
    throw Error(ErrorKind::config, "gamma and lambda must be positive");
  }
}

RunConfig default_config() {
  RunConfig c;
  c.assets_dir = default_assets_dir();
  return c;
}

namespace {

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw Error(ErrorKind::config, "expected boolean for " + key + ", got " + value);
}

Instant parse_duration_or_throw(const std::string& value, const std::string& key) {
  auto parsed = parse_duration(value);
  if (!parsed) {
    throw Error(ErrorKind::config, "bad duration for " + key + ": " + value);
  }
  return *parsed;
}

std::vector<std::string> split_csv(const std::string& value) {
  std::vector<std::string> out;
  std::string current;
  for (char c : value + ",") {
    if (c == ',') {
      std::string t = trim(current);
      if (!t.empty()) out.push_back(t);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  return out;
}

}  // namespace

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw Error(ErrorKind::config, "cannot open config file: " + file.string());
  }
  RunConfig c = default_config();
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = t.substr(1, t.size() - 2);
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::config, file.string() + ":" + std::to_string(line_no) +
                                         ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    const std::string path = section.empty() ? key : section + "." + key;

    if (path == "run.game_id") c.game_id = value;
    else if (path == "run.seed") c.seed = std::stoull(value);
    else if (path == "run.deterministic") c.deterministic = parse_bool(value, path);
    else if (path == "run.jobs") c.jobs = std::stoi(value);
    else if (path == "run.assets") c.assets_dir = value;
    else if (path == "providers.completion")
      c.completion_provider = value == "remote" ? ProviderKind::remote : ProviderKind::mock;
    else if (path == "providers.embedding")
      c.embedding_provider = value == "remote" ? ProviderKind::remote : ProviderKind::mock;
    else if (path == "providers.embed_dim") c.embed_dim = std::stoul(value);
    else if (path == "providers.llm_model") c.llm_model = value;
    else if (path == "providers.embed_model") c.embed_model = value;
    else if (path == "providers.max_attempts") c.provider_max_attempts = std::stoi(value);
    else if (path == "providers.backoff_ms") c.provider_backoff_ms = std::stoi(value);
    else if (path == "drift.window") c.drift.window = parse_duration_or_throw(value, path);
    else if (path == "drift.step") c.drift.step = parse_duration_or_throw(value, path);
    else if (path == "drift.gamma") c.drift.gamma = std::stod(value);
    else if (path == "drift.lambda") c.drift.lambda_jsd = std::stod(value);
    else if (path == "drift.min_posts") c.drift.min_posts = std::stoul(value);
    else if (path == "synthesis.persona_threshold")
      c.synthesis.persona_threshold = std::stod(value);
    else if (path == "synthesis.top_k_refs") c.synthesis.top_k_refs = std::stoi(value);
    else if (path == "synthesis.max_retries") c.synthesis.max_retries = std::stoi(value);
    else if (path == "synthesis.question_types")
      c.synthesis.question_types = split_csv(value);
    else if (path == "synthesis.use_hypothetical")
      c.synthesis.ablation.use_hypothetical = parse_bool(value, path);
    else if (path == "synthesis.use_persona")
      c.synthesis.ablation.use_persona = parse_bool(value, path);
    else if (path == "synthesis.use_template")
      c.synthesis.ablation.use_template = parse_bool(value, path);
    else if (path == "bm25.k1") c.bm25.k1 = std::stod(value);
    else if (path == "bm25.b") c.bm25.b = std::stod(value);
    else if (path == "chunks.max_chars") c.chunks.max_chars = std::stoul(value);
    else if (path == "chunks.overlap_chars") c.chunks.overlap_chars = std::stoul(value);
    else if (path == "community.dedup_threshold") c.dedup_threshold = std::stod(value);
    else if (path == "community.persona_confidence_floor")
      c.persona_confidence_floor = std::stod(value);
    else if (path == "ner.pseudo_examples") c.ner_pseudo_examples = std::stoi(value);
    else if (path == "ner.extractor")
      c.ner_extractor = value == "dictionary" ? ExtractorKind::dictionary
                                              : ExtractorKind::llm_self_icl;
    else if (path == "ner.gazetteer") c.gazetteer = value;
    else if (path == "eval.prepend_persona")
      c.eval_prepend_persona = parse_bool(value, path);
    else {
      throw Error(ErrorKind::config, file.string() + ":" + std::to_string(line_no) +
                                         ": unknown key " + path);
    }
  }
  c.synthesis.seed = c.seed;
  return c;
}

namespace {

std::string env_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v ? v : "";
}

}  // namespace

ProviderSet make_providers(const RunConfig& config) {
  ProviderSet set;
  if (config.completion_provider == ProviderKind::mock) {
    set.completion = std::make_unique<MockCompletionProvider>(
        Rng(config.seed).substream("mock").next_u64());
  } else {
    RemoteProviderConfig remote;
    remote.endpoint = env_or_empty("CHRONO_LLM_ENDPOINT");
    remote.api_key = env_or_empty("CHRONO_LLM_KEY");
    remote.model = config.llm_model;
    remote.max_attempts = config.provider_max_attempts;
    remote.backoff_ms = config.provider_backoff_ms;
    set.completion = std::make_unique<RemoteCompletionProvider>(std::move(remote));
  }
  if (config.embedding_provider == ProviderKind::mock) {
    set.embedding = std::make_unique<MockEmbeddingProvider>(config.embed_dim);
  } else {
    RemoteProviderConfig remote;
    remote.endpoint = env_or_empty("CHRONO_EMBED_ENDPOINT");
    remote.api_key = env_or_empty("CHRONO_EMBED_KEY");
    remote.model = config.embed_model;
    remote.max_attempts = config.provider_max_attempts;
    remote.backoff_ms = config.provider_backoff_ms;
    set.embedding =
        std::make_unique<RemoteEmbeddingProvider>(std::move(remote), config.embed_dim);
  }
  return set;
}

}  // namespace chronoplay
