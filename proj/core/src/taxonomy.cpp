#include "chronoplay/taxonomy.hpp"

#include <fstream>

namespace chronoplay {

TopicId TopicId::parse(std::string_view rendered) {
  auto slash = rendered.find('/');
  if (slash == std::string_view::npos || slash == 0 || slash + 1 >= rendered.size()) {
    throw Error(ErrorKind::parse,
                "topic must be MAIN/SUB, got: " + std::string(rendered));
  }
  return TopicId{std::string(rendered.substr(0, slash)),
                 std::string(rendered.substr(slash + 1))};
}

Taxonomy Taxonomy::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw Error(ErrorKind::config, "cannot open taxonomy file: " + file.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse,
                "taxonomy " + file.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

Taxonomy Taxonomy::from_json(const nlohmann::json& j) {
  Taxonomy t;
  if (!j.contains("main_categories") || !j["main_categories"].is_array()) {
    throw Error(ErrorKind::parse, "taxonomy: missing main_categories array");
  }
  for (const auto& main : j["main_categories"]) {
    const std::string main_name = main.at("name").get<std::string>();
    for (const auto& sub : main.at("sub_categories")) {
      TopicId topic{main_name, sub.at("name").get<std::string>()};
      t.leaves_.push_back(topic);
      t.descriptions_[topic] = sub.value("description", "");
      t.displays_[topic] = sub.value("display", topic.sub);
    }
  }
  if (t.leaves_.empty()) {
    throw Error(ErrorKind::parse, "taxonomy: no leaf topics");
  }
  return t;
}

bool Taxonomy::contains(const TopicId& topic) const {
  return descriptions_.count(topic) > 0;
}

const std::string& Taxonomy::description(const TopicId& topic) const {
  auto it = descriptions_.find(topic);
  if (it == descriptions_.end()) {
    throw Error(ErrorKind::lookup, "unknown topic: " + topic.render());
  }
  return it->second;
}

const std::string& Taxonomy::display(const TopicId& topic) const {
  auto it = displays_.find(topic);
  if (it == displays_.end()) {
    throw Error(ErrorKind::lookup, "unknown topic: " + topic.render());
  }
  return it->second;
}

std::string Taxonomy::render_leaf_list() const {
  std::string out;
  for (const auto& leaf : leaves_) {
    out += leaf.render();
    out += '\n';
  }
  return out;
}

}  // namespace chronoplay
