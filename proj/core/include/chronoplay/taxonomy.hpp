#pragma once
// Hierarchical topic taxonomy: 6 main categories, 21 sub-categories.
// Topics are always leaves, rendered "MAIN/SUB".

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "chronoplay/common.hpp"

namespace chronoplay {

struct TopicId {
  std::string main;
  std::string sub;

  std::string render() const { return main + "/" + sub; }
  static TopicId parse(std::string_view rendered);  // throws ErrorKind::parse

  auto operator<=>(const TopicId&) const = default;
};

class Taxonomy {
public:
  static Taxonomy load(const std::filesystem::path& file);
  static Taxonomy from_json(const nlohmann::json& j);

  bool contains(const TopicId& topic) const;
  const std::vector<TopicId>& leaves() const { return leaves_; }
  // Human-readable description of a leaf (used as [Topic_Description]).
  const std::string& description(const TopicId& topic) const;
  const std::string& display(const TopicId& topic) const;

  // One "MAIN/SUB" per line, for classification prompts.
  std::string render_leaf_list() const;

private:
  std::vector<TopicId> leaves_;
  std::map<TopicId, std::string> descriptions_;
  std::map<TopicId, std::string> displays_;
};

}  // namespace chronoplay
