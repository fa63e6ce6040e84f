#pragma once
// Dual-dynamic benchmark evolution: knowledge-update invalidation and
// regeneration, interest-drift resampling, and the per-step composition
// report.

#include <optional>
#include <vector>

#include "chronoplay/drift.hpp"
#include "chronoplay/entity.hpp"
#include "chronoplay/ingest.hpp"
#include "chronoplay/synthesis.hpp"

namespace chronoplay {

struct Announcement {
  std::string text;
  Instant timestamp = 0;
  std::vector<KnowledgeSnippet> snippets;  // chunked from text
  std::set<EntityId> entities;             // sigma_update
};

using EntityExtractor = std::function<std::set<EntityId>(const std::string& text)>;

// Chunks the announcement text into official_update snippets (deterministic
// content-addressed doc id) and extracts its entity set.
Announcement make_announcement(const std::string& text, Instant timestamp,
                               const std::string& game_id, const ChunkPolicy& policy,
                               const EntityExtractor& extract);

enum class UpdateMode { dual, knowledge_only, interest_only };
UpdateMode update_mode_from_string(std::string_view s);
std::string to_string(UpdateMode mode);

// Stale iff the tuple's entity set intersects the update entities; both
// partitions preserve input order.
std::pair<std::vector<EvalTuple>, std::vector<EvalTuple>> find_stale(
    const std::vector<EvalTuple>& tuples, const std::set<EntityId>& update_entities);

struct Composition {
  std::size_t inherited = 0;
  std::size_t knowledge = 0;
  std::size_t interest = 0;

  std::size_t total() const { return inherited + knowledge + interest; }
  nlohmann::json to_json() const;
};

Composition slice_composition(const BenchmarkSlice& slice);

struct KnowledgeUpdateResult {
  BenchmarkSlice slice;
  KnowledgeBase kb;
  std::size_t stale = 0;
  std::size_t regenerated = 0;
  std::size_t dropped = 0;  // synthesis-exhausted replacements
};

// K_{t+1} = K_t union announcement snippets; each stale tuple's topic
// re-enters synthesis against K_{t+1} with origin knowledge_update.
// Synthesis failures never abort the update.
KnowledgeUpdateResult apply_knowledge_update(const BenchmarkSlice& slice,
                                             const Announcement& announcement,
                                             Synthesizer& synthesizer);

// Largest-remainder apportionment of n over the target distribution. Ties in
// remainder break by larger mass, then TopicId ascending.
std::map<TopicId, std::size_t> target_counts(const TopicDistribution& target,
                                             std::size_t n);

struct ResampleResult {
  BenchmarkSlice slice;
  std::size_t evicted = 0;
  std::size_t synthesized = 0;
  std::size_t shortfall = 0;  // deficits left unfilled by failed synthesis
};

// Aligns per-topic counts with target_counts(P_c, N): surplus topics evict
// oldest-timestamp-first (absent timestamps first, then id ascending),
// deficits fill via synthesis with origin interest_update. Previously
// carried tuples keep origin inherited; tuples regenerated earlier in the
// same step keep their update origin. kb version is unchanged.
ResampleResult resample_for_interest(const BenchmarkSlice& slice,
                                     const TopicDistribution& target,
                                     Synthesizer& synthesizer,
                                     std::optional<std::size_t> n_override = std::nullopt);

struct StepEvents {
  std::vector<Announcement> announcements;
  std::vector<CommunityPost> posts;  // classified
};

struct StepResult {
  BenchmarkSlice slice;
  KnowledgeBase kb;
  Composition composition;
  std::optional<DriftReport> drift;
  std::size_t stale = 0;
  std::size_t dropped = 0;
  std::size_t evicted = 0;
  std::size_t shortfall = 0;
};

// One lifecycle transition B_t -> B_{t+1}. dual: knowledge updates in
// timestamp order, then interest resampling when drift flags. knowledge_only
// skips the drift pathway. interest_only skips invalidation and freezes the
// knowledge base.
StepResult step(const BenchmarkSlice& slice, StepEvents events, UpdateMode mode,
                const DriftConfig& drift_config, Synthesizer& synthesizer);

// On-disk benchmark store: kb/<version>.jsonl snapshots plus
// slices/NNN/{manifest.json,tuples.jsonl,report.json}. Slice writes are
// temp-then-rename.
class BenchmarkStore {
public:
  explicit BenchmarkStore(std::filesystem::path root);

  void init();
  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path slice_dir(int index) const;

  void save_kb(const KnowledgeBase& kb);
  KnowledgeBase load_kb(const std::string& version) const;

  bool has_slice(int index) const;
  void save_slice(const BenchmarkSlice& slice, const nlohmann::json& report,
                  bool force = false);
  BenchmarkSlice load_slice(int index) const;
  nlohmann::json load_report(int index) const;
  std::vector<int> slice_indices() const;
  std::optional<int> latest_index() const;

private:
  std::filesystem::path root_;
};

}  // namespace chronoplay
