#pragma once
// Shared test fixtures: temp directories, snippet/tuple builders, and the
// assets-dir lookup used across suites.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "chronoplay/model.hpp"
#include "chronoplay/prompts.hpp"

namespace fixtures {

inline std::filesystem::path assets_dir() {
  return chronoplay::default_assets_dir();
}

class TempDir {
public:
  TempDir() {
    auto base = std::filesystem::temp_directory_path();
    std::string tmpl = (base / "chronoplay_test_XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (!mkdtemp(buf.data())) {
      throw std::runtime_error("mkdtemp failed");
    }
    path_ = buf.data();
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

inline chronoplay::KnowledgeSnippet snippet(
    const std::string& id, const std::string& content,
    std::optional<chronoplay::Instant> ts = std::nullopt,
    std::set<chronoplay::EntityId> entities = {}) {
  chronoplay::KnowledgeSnippet s;
  s.id = id;
  s.content = content;
  s.timestamp = ts;
  s.entities = std::move(entities);
  s.source_kind = chronoplay::SourceKind::wiki;
  s.game_id = "testgame";
  return s;
}

// A tuple whose derived fields (timestamp, entities, id) are consistent with
// the given reference snippets.
inline chronoplay::EvalTuple tuple_for(const std::vector<chronoplay::KnowledgeSnippet>& refs,
                                       const chronoplay::TopicId& topic,
                                       const std::string& question,
                                       const std::string& answer) {
  chronoplay::EvalTuple t;
  t.question = question;
  t.answer = answer;
  for (const auto& s : refs) t.ref_ids.push_back(s.id);
  t.topic = topic;
  t.timestamp = chronoplay::derive_tuple_timestamp(refs);
  t.entities = chronoplay::derive_tuple_entities(refs);
  t.question_type = "extractive";
  t.origin = chronoplay::Origin::synthesized;
  t.id = chronoplay::tuple_content_id(t.question, t.answer, t.ref_ids);
  return t;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  out << content;
}

// FNV-1a over sorted (relative path, bytes) pairs of a directory tree.
inline std::uint64_t tree_hash(const std::filesystem::path& root) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::vector<std::string> keys;
  for (const auto& f : files) {
    keys.push_back(std::filesystem::relative(f, root).generic_string());
  }
  std::sort(keys.begin(), keys.end());
  std::uint64_t h = chronoplay::fnv1a64("tree");
  for (const auto& rel : keys) {
    h = chronoplay::fnv1a64(rel, h);
    std::ifstream in(root / rel, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    h = chronoplay::fnv1a64("\x1f", h);
    h = chronoplay::fnv1a64(bytes, h);
    h = chronoplay::fnv1a64("\n", h);
  }
  return h;
}

}  // namespace fixtures
