#include "chronoplay/lifecycle.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace chronoplay {

Announcement make_announcement(const std::string& text, Instant timestamp,
                               const std::string& game_id, const ChunkPolicy& policy,
                               const EntityExtractor& extract) {
  if (text.empty()) {
    throw Error(ErrorKind::validation, "announcement text is empty");
  }
  Announcement a;
  a.text = text;
  a.timestamp = timestamp;
  RawDocument doc;
  doc.doc_id = "ann-" + hex64(fnv1a64(text + "\x1f" + std::to_string(timestamp)));
  doc.title = "announcement";
  doc.body = text;
  doc.published_at = timestamp;
  doc.source_kind = SourceKind::official_update;
  doc.game_id = game_id;
  a.snippets = chunk_document(doc, policy);
  a.entities = extract(text);
  for (auto& s : a.snippets) s.entities = a.entities;
  return a;
}

UpdateMode update_mode_from_string(std::string_view s) {
  if (s == "dual") return UpdateMode::dual;
  if (s == "knowledge-only" || s == "knowledge_only") return UpdateMode::knowledge_only;
  if (s == "interest-only" || s == "interest_only") return UpdateMode::interest_only;
  throw Error(ErrorKind::config, "unknown update mode: " + std::string(s));
}

std::string to_string(UpdateMode mode) {
  switch (mode) {
    case UpdateMode::dual: return "dual";
    case UpdateMode::knowledge_only: return "knowledge-only";
    case UpdateMode::interest_only: return "interest-only";
  }
  return "dual";
}

std::pair<std::vector<EvalTuple>, std::vector<EvalTuple>> find_stale(
    const std::vector<EvalTuple>& tuples, const std::set<EntityId>& update_entities) {
  std::vector<std::pair<std::string, std::set<EntityId>>> items;
  items.reserve(tuples.size());
  for (const auto& t : tuples) items.emplace_back(t.id, t.entities);
  const EntityIndex index = EntityIndex::build(items, EntityIndex::ItemKind::tuple);
  const std::set<std::string> affected = index.lookup_affected(update_entities);

  std::vector<EvalTuple> stale;
  std::vector<EvalTuple> valid;
  for (const auto& t : tuples) {
    (affected.count(t.id) ? stale : valid).push_back(t);
  }
  return {std::move(stale), std::move(valid)};
}

nlohmann::json Composition::to_json() const {
  const double n = total() > 0 ? static_cast<double>(total()) : 1.0;
  nlohmann::json j;
  j["counts"] = {{"inherited", inherited},
                 {"knowledge_update", knowledge},
                 {"interest_update", interest}};
  j["fractions"] = {{"inherited", static_cast<double>(inherited) / n},
                    {"knowledge_update", static_cast<double>(knowledge) / n},
                    {"interest_update", static_cast<double>(interest) / n}};
  j["total"] = total();
  return j;
}

Composition slice_composition(const BenchmarkSlice& slice) {
  Composition c;
  for (const auto& t : slice.tuples) {
    switch (t.origin) {
      case Origin::knowledge_update: ++c.knowledge; break;
      case Origin::interest_update: ++c.interest; break;
      default: ++c.inherited; break;  // inherited and first-generation alike
    }
  }
  return c;
}

namespace {

// Insert unless the content id already exists in the slice (identical
// regenerations deduplicate; a duplicate counts as a failed replacement).
bool insert_unique(std::vector<EvalTuple>& tuples, EvalTuple tuple) {
  for (const auto& t : tuples) {
    if (t.id == tuple.id) return false;
  }
  tuples.push_back(std::move(tuple));
  return true;
}

}  // namespace

KnowledgeUpdateResult apply_knowledge_update(const BenchmarkSlice& slice,
                                             const Announcement& announcement,
                                             Synthesizer& synthesizer) {
  if (synthesizer.kb().version() != slice.kb_version) {
    throw Error(ErrorKind::lookup, "synthesizer kb does not match slice kb_version");
  }
  KnowledgeUpdateResult result;
  auto [stale, valid] = find_stale(slice.tuples, announcement.entities);
  result.stale = stale.size();

  result.kb = synthesizer.kb().union_with(announcement.snippets);
  synthesizer.set_kb(result.kb);

  result.slice.index = slice.index + 1;
  result.slice.parent_index = slice.index;
  result.slice.kb_version = result.kb.version();
  result.slice.phase_start = slice.phase_start;
  result.slice.tuples = std::move(valid);
  for (const auto& old : stale) {
    try {
      EvalTuple replacement = synthesizer.synthesize_tuple(old.topic);
      replacement.origin = Origin::knowledge_update;
      if (insert_unique(result.slice.tuples, std::move(replacement))) {
        ++result.regenerated;
      } else {
        ++result.dropped;
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::exhausted && e.kind() != ErrorKind::sampling) throw;
      ++result.dropped;
    }
  }
  return result;
}

std::map<TopicId, std::size_t> target_counts(const TopicDistribution& target,
                                             std::size_t n) {
  std::map<TopicId, std::size_t> counts;
  if (n == 0 || target.mass.empty()) return counts;
  struct Entry {
    TopicId topic;
    double mass;
    std::size_t floor;
    double remainder;
  };
  std::vector<Entry> entries;
  std::size_t assigned = 0;
  for (const auto& [topic, mass] : target.mass) {
    const double exact = mass * static_cast<double>(n);
    Entry e{topic, mass, static_cast<std::size_t>(exact), 0.0};
    e.remainder = exact - static_cast<double>(e.floor);
    assigned += e.floor;
    entries.push_back(std::move(e));
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.remainder != b.remainder) return a.remainder > b.remainder;
    if (a.mass != b.mass) return a.mass > b.mass;
    return a.topic < b.topic;
  });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) {
    ++entries[i % entries.size()].floor;
  }
  for (const auto& e : entries) {
    if (e.floor > 0) counts[e.topic] = e.floor;
  }
  return counts;
}

ResampleResult resample_for_interest(const BenchmarkSlice& slice,
                                     const TopicDistribution& target,
                                     Synthesizer& synthesizer,
                                     std::optional<std::size_t> n_override) {
  if (target.is_zero_count()) {
    throw Error(ErrorKind::contract, "resample target is the zero-count distribution");
  }
  const std::size_t n = n_override.value_or(slice.tuples.size());
  const std::map<TopicId, std::size_t> targets = target_counts(target, n);

  // Current tuples grouped per topic, oldest first for eviction.
  std::map<TopicId, std::vector<EvalTuple>> by_topic;
  for (const auto& t : slice.tuples) by_topic[t.topic].push_back(t);
  for (auto& [topic, group] : by_topic) {
    std::sort(group.begin(), group.end(), older_than);
  }

  ResampleResult result;
  result.slice.index = slice.index + 1;
  result.slice.parent_index = slice.index;
  result.slice.kb_version = slice.kb_version;
  result.slice.phase_start = slice.phase_start;

  std::set<std::string> kept_ids;
  for (auto& [topic, group] : by_topic) {
    auto it = targets.find(topic);
    const std::size_t want = it == targets.end() ? 0 : it->second;
    if (group.size() > want) {
      result.evicted += group.size() - want;
      group.erase(group.begin(),
                  group.begin() + static_cast<std::ptrdiff_t>(group.size() - want));
    }
    for (const auto& t : group) kept_ids.insert(t.id);
  }
  // Preserve slice order for retained tuples.
  for (const auto& t : slice.tuples) {
    if (!kept_ids.count(t.id)) continue;
    EvalTuple kept = t;
    // Update-origin tags from the current step survive; anything older is
    // inherited now.
    if (kept.origin == Origin::synthesized) kept.origin = Origin::inherited;
    result.slice.tuples.push_back(std::move(kept));
  }
  // Fill deficits.
  for (const auto& [topic, want] : targets) {
    const std::size_t have =
        by_topic.count(topic) ? by_topic[topic].size() : 0;
    for (std::size_t i = have; i < want; ++i) {
      try {
        EvalTuple fresh = synthesizer.synthesize_tuple(topic);
        fresh.origin = Origin::interest_update;
        if (insert_unique(result.slice.tuples, std::move(fresh))) {
          ++result.synthesized;
        } else {
          ++result.shortfall;
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::exhausted && e.kind() != ErrorKind::sampling) throw;
        ++result.shortfall;
      }
    }
  }
  return result;
}

StepResult step(const BenchmarkSlice& slice, StepEvents events, UpdateMode mode,
                const DriftConfig& drift_config, Synthesizer& synthesizer) {
  StepResult result;

  // Carried-over tuples are inherited relative to the new phase.
  BenchmarkSlice working = slice;
  for (auto& t : working.tuples) t.origin = Origin::inherited;

  Instant horizon = slice.phase_start;
  for (const auto& a : events.announcements) horizon = std::max(horizon, a.timestamp);
  for (const auto& p : events.posts) horizon = std::max(horizon, p.created_at);

  std::sort(events.announcements.begin(), events.announcements.end(),
            [](const Announcement& a, const Announcement& b) {
              return a.timestamp < b.timestamp;
            });

  KnowledgeBase kb = synthesizer.kb();
  std::size_t dropped = 0;
  std::size_t stale = 0;
  if (mode != UpdateMode::interest_only) {
    for (const auto& announcement : events.announcements) {
      KnowledgeUpdateResult ku = apply_knowledge_update(working, announcement, synthesizer);
      stale += ku.stale;
      dropped += ku.dropped;
      kb = ku.kb;
      working = std::move(ku.slice);
      working.index = slice.index;  // a single step advances the index once
    }
  }

  std::size_t evicted = 0;
  std::size_t shortfall = 0;
  if (mode != UpdateMode::knowledge_only && !events.posts.empty()) {
    const DriftReport report =
        detect_drift(events.posts, slice.phase_start, horizon, drift_config);
    result.drift = report;
    if (report.flagged) {
      const TopicDistribution current = topic_distribution(
          events.posts, report.current_start, report.current_end);
      ResampleResult rs = resample_for_interest(working, current, synthesizer);
      evicted = rs.evicted;
      shortfall = rs.shortfall;
      working = std::move(rs.slice);
      working.index = slice.index;
    }
  }

  working.index = slice.index + 1;
  working.parent_index = slice.index;
  working.phase_start = horizon;
  working.kb_version = mode == UpdateMode::interest_only ? slice.kb_version
                                                         : kb.version();

  result.slice = std::move(working);
  result.kb = std::move(kb);
  result.composition = slice_composition(result.slice);
  result.stale = stale;
  result.dropped = dropped;
  result.evicted = evicted;
  result.shortfall = shortfall;
  return result;
}

BenchmarkStore::BenchmarkStore(std::filesystem::path root) : root_(std::move(root)) {}

void BenchmarkStore::init() {
  std::filesystem::create_directories(root_ / "kb");
  std::filesystem::create_directories(root_ / "slices");
}

std::filesystem::path BenchmarkStore::slice_dir(int index) const {
  std::ostringstream name;
  name << std::setw(3) << std::setfill('0') << index;
  return root_ / "slices" / name.str();
}

void BenchmarkStore::save_kb(const KnowledgeBase& kb) {
  const auto path = root_ / "kb" / (kb.version() + ".jsonl");
  if (std::filesystem::exists(path)) return;  // content-addressed: already stored
  write_snippets_jsonl(path, kb.snippets());
}

KnowledgeBase BenchmarkStore::load_kb(const std::string& version) const {
  const auto path = root_ / "kb" / (version + ".jsonl");
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorKind::lookup, "unknown kb version: " + version);
  }
  return KnowledgeBase::from_snippets(read_snippets_jsonl(path));
}

bool BenchmarkStore::has_slice(int index) const {
  return std::filesystem::exists(slice_dir(index) / "manifest.json");
}

void BenchmarkStore::save_slice(const BenchmarkSlice& slice, const nlohmann::json& report,
                                bool force) {
  const auto dir = slice_dir(slice.index);
  if (std::filesystem::exists(dir)) {
    if (!force) {
      throw Error(ErrorKind::validation,
                  "slice " + std::to_string(slice.index) +
                      " already exists (use --force to overwrite)");
    }
    std::filesystem::remove_all(dir);
  }
  const auto tmp = dir.parent_path() / (dir.filename().string() + ".tmp");
  std::filesystem::remove_all(tmp);
  std::filesystem::create_directories(tmp);
  {
    std::ofstream manifest(tmp / "manifest.json");
    manifest << slice_manifest_json(slice).dump(2) << '\n';
  }
  write_tuples_jsonl(tmp / "tuples.jsonl", slice.tuples);
  {
    std::ofstream out(tmp / "report.json");
    out << report.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, dir);
}

BenchmarkSlice BenchmarkStore::load_slice(int index) const {
  const auto dir = slice_dir(index);
  std::ifstream manifest(dir / "manifest.json");
  if (!manifest) {
    throw Error(ErrorKind::lookup, "no slice " + std::to_string(index) + " in store");
  }
  nlohmann::json j;
  manifest >> j;
  BenchmarkSlice slice = slice_from_manifest_json(j);
  slice.tuples = read_tuples_jsonl(dir / "tuples.jsonl");
  return slice;
}

nlohmann::json BenchmarkStore::load_report(int index) const {
  std::ifstream in(slice_dir(index) / "report.json");
  if (!in) {
    throw Error(ErrorKind::lookup, "no report for slice " + std::to_string(index));
  }
  nlohmann::json j;
  in >> j;
  return j;
}

std::vector<int> BenchmarkStore::slice_indices() const {
  std::vector<int> out;
  const auto dir = root_ / "slices";
  if (!std::filesystem::is_directory(dir)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_directory()) continue;
    const std::string name = entry.path().filename().string();
    if (name.empty() || !std::all_of(name.begin(), name.end(), [](unsigned char c) {
          return std::isdigit(c);
        })) {
      continue;
    }
    out.push_back(std::stoi(name));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<int> BenchmarkStore::latest_index() const {
  auto indices = slice_indices();
  if (indices.empty()) return std::nullopt;
  return indices.back();
}

}  // namespace chronoplay
