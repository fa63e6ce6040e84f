#pragma once
// Prompt asset loading and placeholder filling. Prompt text ships as files
// under assets/prompts/ so operators can adjust wording without rebuilding.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "chronoplay/model.hpp"

namespace chronoplay {

class PromptLibrary {
public:
  // `dir` is the prompts root, e.g. <assets>/prompts.
  explicit PromptLibrary(std::filesystem::path dir);

  // name is a relative path without extension, e.g. "synthesis/agent_system".
  const std::string& get(const std::string& name) const;
  const std::filesystem::path& dir() const { return dir_; }

private:
  std::filesystem::path dir_;
  mutable std::map<std::string, std::string> cache_;
};

// Replaces each exact marker key (e.g. "[Question]", "{game_name}") with its
// value, everywhere it occurs.
std::string fill_placeholders(std::string text,
                              const std::map<std::string, std::string>& values);

// Renders snippets into the block format the [Documents] marker expands to:
//   Document <k> (id=<snippet id>):
//   <content>
// terminated by an "End of documents." line. The mock provider parses this
// shape back.
std::string render_documents(const std::vector<KnowledgeSnippet>& snippets);
std::string render_document_texts(const std::vector<std::string>& texts);

// Placeholder names of form [NAME] occurring in a template, in first-seen
// order, deduplicated.
std::vector<std::string> placeholders_in(const std::string& template_text);

// Assets root resolution: CHRONOPLAY_ASSETS env var, else the compiled-in
// source default.
std::filesystem::path default_assets_dir();

}  // namespace chronoplay
