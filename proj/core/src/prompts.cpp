#include "chronoplay/prompts.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#ifndef CHRONOPLAY_DEFAULT_ASSETS_DIR
#define CHRONOPLAY_DEFAULT_ASSETS_DIR "assets"
#endif

namespace chronoplay {

PromptLibrary::PromptLibrary(std::filesystem::path dir) : dir_(std::move(dir)) {
  if (!std::filesystem::is_directory(dir_)) {
    throw Error(ErrorKind::config, "prompt directory does not exist: " + dir_.string());
  }
}

const std::string& PromptLibrary::get(const std::string& name) const {
  auto it = cache_.find(name);
  if (it != cache_.end()) return it->second;
  const std::filesystem::path file = dir_ / (name + ".txt");
  std::ifstream in(file);
  if (!in) {
    throw Error(ErrorKind::config, "missing prompt asset: " + file.string());
  }
  std::ostringstream body;
  body << in.rdbuf();
  return cache_.emplace(name, body.str()).first->second;
}

std::string fill_placeholders(std::string text,
                              const std::map<std::string, std::string>& values) {
  for (const auto& [marker, value] : values) {
    std::size_t pos = 0;
    while ((pos = text.find(marker, pos)) != std::string::npos) {
      text.replace(pos, marker.size(), value);
      pos += value.size();
    }
  }
  return text;
}

std::string render_document_texts(const std::vector<std::string>& texts) {
  std::string out = "\n";
  for (std::size_t i = 0; i < texts.size(); ++i) {
    out += "Document " + std::to_string(i + 1) + " (id=doc" + std::to_string(i + 1) +
           "):\n" + texts[i] + "\n\n";
  }
  out += "End of documents.";
  return out;
}

std::string render_documents(const std::vector<KnowledgeSnippet>& snippets) {
  std::string out = "\n";
  for (std::size_t i = 0; i < snippets.size(); ++i) {
    out += "Document " + std::to_string(i + 1) + " (id=" + snippets[i].id + "):\n" +
           snippets[i].content + "\n\n";
  }
  out += "End of documents.";
  return out;
}

std::vector<std::string> placeholders_in(const std::string& template_text) {
  static const std::regex ph(R"(\[([A-Z][A-Z0-9_]*)\])");
  std::vector<std::string> out;
  for (auto it = std::sregex_iterator(template_text.begin(), template_text.end(), ph);
       it != std::sregex_iterator(); ++it) {
    const std::string name = (*it)[1].str();
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  }
  return out;
}

std::filesystem::path default_assets_dir() {
  if (const char* env = std::getenv("CHRONOPLAY_ASSETS")) {
    return std::filesystem::path(env);
  }
  return std::filesystem::path(CHRONOPLAY_DEFAULT_ASSETS_DIR);
}

}  // namespace chronoplay
