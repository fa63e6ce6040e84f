#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>

#include "chronoplay/judge.hpp"
#include "chronoplay/lifecycle.hpp"

namespace chronoplay::cli {

namespace {

Instant parse_instant_or_throw(const std::string& value, const std::string& flag) {
  auto parsed = parse_instant(value);
  if (!parsed) {
    throw Error(ErrorKind::config,
                flag + " expects epoch seconds or YYYY-MM-DD, got: " + value);
  }
  return *parsed;
}

Instant parse_duration_or_throw(const std::string& value, const std::string& flag) {
  auto parsed = parse_duration(value);
  if (!parsed) {
    throw Error(ErrorKind::config, flag + " expects a duration like 5d, got: " + value);
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

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::config, "cannot write " + path.string());
  }
  out << j.dump(2) << '\n';
}

bool skip_existing(const std::filesystem::path& target, bool force) {
  if (!std::filesystem::exists(target) || force) return false;
  std::cout << target.string() << " already exists; skipping (use --force to redo)\n";
  return true;
}

std::vector<std::string> read_id_lines(const std::filesystem::path& file) {
  std::vector<std::string> out;
  if (file.empty()) return out;
  std::ifstream in(file);
  if (!in) {
    throw Error(ErrorKind::config, "cannot open list file: " + file.string());
  }
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (!t.empty() && t[0] != '#') out.push_back(t);
  }
  return out;
}

EntityExtractor make_extractor(const RunConfig& config, CompletionProvider& completion,
                               const PromptLibrary& prompts,
                               const std::filesystem::path& gazetteer_override) {
  const auto gazetteer_path =
      gazetteer_override.empty() ? config.gazetteer : gazetteer_override;
  if (config.ner_extractor == ExtractorKind::dictionary || !gazetteer_override.empty()) {
    if (gazetteer_path.empty()) {
      throw Error(ErrorKind::config, "dictionary extractor requires a gazetteer file");
    }
    auto gazetteer = load_gazetteer(gazetteer_path);
    return [gazetteer](const std::string& text) {
      return extract_entities_dictionary(text, gazetteer);
    };
  }
  NerConfig ner;
  ner.pseudo_examples = config.ner_pseudo_examples;
  ner.entity_descriptor = prompts.get("ner/entity_types");
  return [&completion, &prompts, ner](const std::string& text) {
    return extract_entities_self_icl(text, completion, prompts, ner);
  };
}

AblationFlags parse_ablation(const std::string& spec) {
  AblationFlags flags;
  for (const auto& token : split_csv(spec)) {
    if (token == "no-hypo" || token == "no-hypothetical") flags.use_hypothetical = false;
    else if (token == "no-persona") flags.use_persona = false;
    else if (token == "no-template") flags.use_template = false;
    else throw Error(ErrorKind::config, "unknown ablation flag: " + token);
  }
  return flags;
}

struct StoreContext {
  BenchmarkStore store;
  BenchmarkSlice slice;
  KnowledgeBase kb;
};

StoreContext load_slice_dir(const std::filesystem::path& slice_dir) {
  const std::string name = slice_dir.filename().string();
  if (name.empty() || !std::all_of(name.begin(), name.end(), [](unsigned char c) {
        return std::isdigit(c);
      })) {
    throw Error(ErrorKind::config,
                "slice path must end in a numeric slice directory: " + slice_dir.string());
  }
  BenchmarkStore store(slice_dir.parent_path().parent_path());
  BenchmarkSlice slice = store.load_slice(std::stoi(name));
  KnowledgeBase kb = store.load_kb(slice.kb_version);
  return {std::move(store), std::move(slice), std::move(kb)};
}

RetrieverFn make_retriever(const std::string& kind, const KnowledgeBase& kb,
                           const RunConfig& config, EmbeddingProvider& embedder,
                           std::shared_ptr<Bm25Index>& bm25_holder,
                           std::shared_ptr<VectorIndex>& dense_holder) {
  if (kind == "bm25") {
    std::vector<std::pair<std::string, std::string>> docs;
    for (const auto& s : kb.snippets()) docs.emplace_back(s.id, s.content);
    bm25_holder = std::make_shared<Bm25Index>(Bm25Index::build(docs, config.bm25));
    auto index = bm25_holder;
    return [index](const std::string& query, std::size_t k) {
      std::vector<std::string> ids;
      for (const auto& [id, score] : index->search(query, k)) ids.push_back(id);
      return ids;
    };
  }
  if (kind == "dense") {
    dense_holder =
        std::make_shared<VectorIndex>(VectorIndex::build(kb.snippets(), embedder));
    auto index = dense_holder;
    return [index, &embedder](const std::string& query, std::size_t k) {
      return dense_search(*index, embedder, query, k);
    };
  }
  throw Error(ErrorKind::config, "unknown retriever: " + kind + " (bm25 or dense)");
}

TemplateBase load_template_base(const std::filesystem::path& file) {
  std::vector<QuestionTemplate> templates;
  for (const auto& row : read_jsonl(file)) templates.push_back(template_from_json(row));
  return TemplateBase(std::move(templates));
}

std::vector<Persona> load_personas(const std::filesystem::path& file) {
  std::vector<Persona> personas;
  for (const auto& row : read_jsonl(file)) personas.push_back(persona_from_json(row));
  return personas;
}

}  // namespace

RunConfig resolve_config(const CommonOptions& common) {
  RunConfig config =
      common.config_file.empty() ? default_config() : load_config(common.config_file);
  if (common.assets) config.assets_dir = *common.assets;
  if (common.seed) config.seed = *common.seed;
  if (common.jobs) config.jobs = *common.jobs;
  if (config.seed == 0) config.seed = 7;
  config.synthesis.seed = config.seed;
  config.validate();
  return config;
}

void cmd_ingest(const CommonOptions& common, const std::filesystem::path& in_dir,
                const std::filesystem::path& out_file,
                std::optional<std::size_t> max_chars,
                std::optional<std::size_t> overlap, const std::string& ner_mode,
                const std::filesystem::path& gazetteer) {
  RunConfig config = resolve_config(common);
  if (skip_existing(out_file, common.force)) return;
  ChunkPolicy policy = config.chunks;
  if (max_chars) policy.max_chars = *max_chars;
  if (overlap) policy.overlap_chars = *overlap;

  std::vector<std::filesystem::path> paths;
  if (!std::filesystem::is_directory(in_dir)) {
    throw Error(ErrorKind::config, "--in must be a directory: " + in_dir.string());
  }
  for (const auto& entry : std::filesystem::directory_iterator(in_dir)) {
    if (entry.path().extension() == ".jsonl") paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) {
    throw Error(ErrorKind::validation, "no .jsonl files under " + in_dir.string());
  }
  std::vector<KnowledgeSnippet> snippets = ingest(paths, policy);

  if (ner_mode != "none") {
    ProviderSet providers = make_providers(config);
    PromptLibrary prompts(config.prompts_dir());
    RunConfig ner_config = config;
    if (ner_mode == "dictionary") ner_config.ner_extractor = ExtractorKind::dictionary;
    if (ner_mode == "llm") ner_config.ner_extractor = ExtractorKind::llm_self_icl;
    EntityExtractor extract =
        make_extractor(ner_config, *providers.completion, prompts, gazetteer);
    for (auto& s : snippets) s.entities = extract(s.content);
  }
  write_snippets_jsonl(out_file, snippets);
  std::cout << "ingested " << snippets.size() << " snippets from " << paths.size()
            << " files -> " << out_file.string() << "\n";
}

void cmd_mine(const CommonOptions& common, const std::filesystem::path& posts_file,
              const std::filesystem::path& out_dir,
              const std::filesystem::path& deny_file,
              const std::filesystem::path& allow_file) {
  RunConfig config = resolve_config(common);
  std::filesystem::create_directories(out_dir);
  if (skip_existing(out_dir / "templates.jsonl", common.force)) return;

  std::vector<CommunityPost> posts;
  for (const auto& row : read_jsonl(posts_file)) posts.push_back(post_from_json(row));

  Taxonomy taxonomy = Taxonomy::load(config.taxonomy_file());
  ProviderSet providers = make_providers(config);
  PromptLibrary prompts(config.prompts_dir());
  MineOptions options;
  options.dedup_threshold = config.dedup_threshold;
  options.persona_confidence_floor = config.persona_confidence_floor;
  options.deny_ids = read_id_lines(deny_file);
  options.allow_ids = read_id_lines(allow_file);

  MinedAssets mined = mine_assets(std::move(posts), taxonomy, *providers.completion,
                                  *providers.embedding, prompts, options);

  std::vector<nlohmann::json> post_rows, template_rows, persona_rows;
  for (const auto& p : mined.classified_posts) post_rows.push_back(to_json(p));
  for (const auto& t : mined.templates) template_rows.push_back(to_json(t));
  for (const auto& p : mined.personas) persona_rows.push_back(to_json(p));
  write_jsonl(out_dir / "classified_posts.jsonl", post_rows);
  write_jsonl(out_dir / "templates.jsonl", template_rows);
  write_jsonl(out_dir / "personas.jsonl", persona_rows);
  std::cout << "mined " << mined.templates.size() << " templates, "
            << mined.personas.size() << " personas from "
            << mined.classified_posts.size() << " classified posts ("
            << mined.classify_failures << " classify failures, "
            << mined.extract_failures << " extract failures)\n";
}

void cmd_synth(const CommonOptions& common, const std::filesystem::path& kb_file,
               const std::filesystem::path& templates_file,
               const std::filesystem::path& personas_file,
               const std::filesystem::path& store_dir, std::size_t n,
               const std::string& topic, const std::string& ablation,
               const std::string& phase_start, const std::string& game_id) {
  RunConfig config = resolve_config(common);
  if (!game_id.empty()) config.game_id = game_id;
  config.synthesis.ablation = parse_ablation(ablation);

  BenchmarkStore store(store_dir);
  store.init();
  if (store.has_slice(0) && !common.force) {
    std::cout << "slice 000 already exists in " << store_dir.string()
              << "; skipping (use --force to redo)\n";
    return;
  }

  KnowledgeBase kb = KnowledgeBase::from_snippets(read_snippets_jsonl(kb_file));
  TemplateBase templates = load_template_base(templates_file);
  std::vector<Persona> personas =
      personas_file.empty() ? std::vector<Persona>{} : load_personas(personas_file);
  Taxonomy taxonomy = Taxonomy::load(config.taxonomy_file());
  ProviderSet providers = make_providers(config);
  PromptLibrary prompts(config.prompts_dir());

  Synthesizer synth(config.synthesis, config.game_id, taxonomy, templates, personas,
                    kb, *providers.completion, *providers.embedding, prompts);

  std::vector<TopicId> topics;
  if (!topic.empty()) {
    topics.push_back(TopicId::parse(topic));
  } else {
    topics = synth.templates().topics();
  }
  if (topics.empty()) {
    throw Error(ErrorKind::sampling, "template base has no topics to synthesize from");
  }

  Rng topic_rng = Rng(config.seed).substream("synth-topics");
  BenchmarkSlice slice;
  slice.index = 0;
  slice.kb_version = kb.version();
  slice.phase_start =
      phase_start.empty() ? 0 : parse_instant_or_throw(phase_start, "--phase-start");
  std::size_t failures = 0;
  std::size_t duplicates = 0;
  while (slice.tuples.size() < n) {
    const TopicId& t = topics[topic_rng.bounded(topics.size())];
    try {
      EvalTuple tuple = synth.synthesize_tuple(t);
      bool exists = std::any_of(slice.tuples.begin(), slice.tuples.end(),
                                [&](const EvalTuple& e) { return e.id == tuple.id; });
      if (exists) {
        ++duplicates;
        if (duplicates > n * 4) break;  // stop chasing a saturated base
        continue;
      }
      slice.tuples.push_back(std::move(tuple));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::exhausted && e.kind() != ErrorKind::sampling) throw;
      ++failures;
      if (failures > n * 4) {
        throw Error(ErrorKind::exhausted,
                    "too many synthesis failures while building slice 000");
      }
    }
  }

  store.save_kb(kb);
  nlohmann::json report;
  report["mode"] = "synth";
  report["requested"] = n;
  report["synthesized"] = slice.tuples.size();
  report["failures"] = failures;
  report["duplicates_skipped"] = duplicates;
  report["composition"] = slice_composition(slice).to_json();
  store.save_slice(slice, report, common.force);

  // The store carries its community bases so later updates can resynthesize.
  std::filesystem::create_directories(store_dir / "assets");
  std::filesystem::copy_file(templates_file, store_dir / "assets" / "templates.jsonl",
                             std::filesystem::copy_options::overwrite_existing);
  if (!personas_file.empty()) {
    std::filesystem::copy_file(personas_file, store_dir / "assets" / "personas.jsonl",
                               std::filesystem::copy_options::overwrite_existing);
  }
  std::cout << "synthesized " << slice.tuples.size() << " tuples into "
            << store.slice_dir(0).string() << " (" << failures << " failures)\n";
}

void cmd_drift(const CommonOptions& common, const std::filesystem::path& posts_file,
               const std::string& from, const std::string& to,
               const std::string& window, const std::string& step,
               std::optional<double> gamma, std::optional<double> lambda,
               std::optional<std::size_t> min_posts,
               const std::filesystem::path& out_file, bool phases_only) {
  RunConfig config = resolve_config(common);
  DriftConfig drift = config.drift;
  if (!window.empty()) drift.window = parse_duration_or_throw(window, "--window");
  if (!step.empty()) drift.step = parse_duration_or_throw(step, "--step");
  if (gamma) drift.gamma = *gamma;
  if (lambda) drift.lambda_jsd = *lambda;
  if (min_posts) drift.min_posts = *min_posts;

  if (skip_existing(out_file, common.force)) return;
  const Instant start = parse_instant_or_throw(from, "--from");
  const Instant end = parse_instant_or_throw(to, "--to");

  std::vector<CommunityPost> posts;
  for (const auto& row : read_jsonl(posts_file)) posts.push_back(post_from_json(row));
  bool needs_classification = std::any_of(posts.begin(), posts.end(),
                                          [](const CommunityPost& p) { return !p.topic; });
  if (needs_classification) {
    Taxonomy taxonomy = Taxonomy::load(config.taxonomy_file());
    ProviderSet providers = make_providers(config);
    PromptLibrary prompts(config.prompts_dir());
    for (auto& p : posts) {
      if (!p.topic) p.topic = classify_topic(p, taxonomy, *providers.completion, prompts);
    }
  }

  nlohmann::json out;
  out["config"] = {{"window", drift.window},
                   {"step", drift.step},
                   {"gamma", drift.gamma},
                   {"lambda", drift.lambda_jsd},
                   {"min_posts", drift.min_posts}};
  nlohmann::json steps = nlohmann::json::array();
  nlohmann::json boundaries = nlohmann::json::array();
  Instant p_tau = start;
  for (Instant c_tau = start + drift.window; c_tau <= end; c_tau += drift.step) {
    DriftReport report = detect_drift(posts, p_tau, c_tau, drift);
    if (!phases_only) {
      steps.push_back(nlohmann::json{{"c_tau", c_tau},
                                     {"p_tau", p_tau},
                                     {"wjsd", report.wjsd},
                                     {"flagged", report.flagged},
                                     {"low_sample", report.low_sample},
                                     {"current_posts", report.current_posts},
                                     {"reference_posts", report.reference_posts}});
    }
    if (report.flagged) {
      boundaries.push_back(c_tau);
      p_tau = c_tau;
    }
  }
  if (!phases_only) out["steps"] = steps;
  out["boundaries"] = boundaries;
  nlohmann::json phases = nlohmann::json::array();
  Instant phase_open = start;
  for (const auto& b : boundaries) {
    phases.push_back(nlohmann::json::array({phase_open, b.get<Instant>()}));
    phase_open = b.get<Instant>();
  }
  phases.push_back(nlohmann::json::array({phase_open, end}));
  out["phases"] = phases;
  write_json_file(out_file, out);
  std::cout << (phases_only ? "phases: " : "drift steps: ")
            << (phases_only ? phases.size() : steps.size()) << ", boundaries: "
            << boundaries.size() << " -> " << out_file.string() << "\n";
}

void cmd_update(const CommonOptions& common, const std::filesystem::path& store_dir,
                const std::filesystem::path& events_file, const std::string& mode_str,
                const std::string& game_id) {
  RunConfig config = resolve_config(common);
  if (!game_id.empty()) config.game_id = game_id;
  const UpdateMode mode = update_mode_from_string(mode_str);

  BenchmarkStore store(store_dir);
  auto latest = store.latest_index();
  if (!latest) {
    throw Error(ErrorKind::validation, "store has no slices: " + store_dir.string());
  }
  BenchmarkSlice slice = store.load_slice(*latest);
  if (store.has_slice(*latest + 1) && !common.force) {
    std::cout << "slice " << (*latest + 1)
              << " already exists; skipping (use --force to redo)\n";
    return;
  }
  KnowledgeBase kb = store.load_kb(slice.kb_version);
  TemplateBase templates = load_template_base(store_dir / "assets" / "templates.jsonl");
  std::vector<Persona> personas;
  if (std::filesystem::exists(store_dir / "assets" / "personas.jsonl")) {
    personas = load_personas(store_dir / "assets" / "personas.jsonl");
  }

  Taxonomy taxonomy = Taxonomy::load(config.taxonomy_file());
  ProviderSet providers = make_providers(config);
  PromptLibrary prompts(config.prompts_dir());
  // Seed the update step by target slice index so successive steps differ.
  RunConfig step_config = config;
  step_config.synthesis.seed =
      Rng(config.seed).substream("update-" + std::to_string(*latest + 1)).next_u64();

  Synthesizer synth(step_config.synthesis, config.game_id, taxonomy, templates,
                    personas, kb, *providers.completion, *providers.embedding, prompts);
  EntityExtractor extract = make_extractor(config, *providers.completion, prompts, {});

  StepEvents events;
  for (const auto& row : read_jsonl(events_file)) {
    const std::string kind = row.value("kind", "");
    if (kind == "announcement") {
      events.announcements.push_back(
          make_announcement(row.at("text").get<std::string>(),
                            row.at("timestamp").get<Instant>(), config.game_id,
                            config.chunks, extract));
    } else if (kind == "post") {
      CommunityPost post = post_from_json(row);
      if (!post.topic) {
        post.topic = classify_topic(post, taxonomy, *providers.completion, prompts);
      }
      events.posts.push_back(std::move(post));
    } else {
      throw Error(ErrorKind::parse, "event kind must be announcement or post, got: " +
                                        kind);
    }
  }

  StepResult result = step(slice, std::move(events), mode, config.drift, synth);
  store.save_kb(result.kb);
  nlohmann::json report;
  report["mode"] = to_string(mode);
  report["composition"] = result.composition.to_json();
  report["stale"] = result.stale;
  report["dropped"] = result.dropped;
  report["evicted"] = result.evicted;
  report["shortfall"] = result.shortfall;
  if (result.drift) {
    report["drift"] = {{"wjsd", result.drift->wjsd},
                       {"flagged", result.drift->flagged},
                       {"low_sample", result.drift->low_sample},
                       {"current_posts", result.drift->current_posts},
                       {"reference_posts", result.drift->reference_posts}};
  }
  store.save_slice(result.slice, report, common.force);
  std::cout << "step " << slice.index << " -> " << result.slice.index << " (" << mode_str
            << "): " << result.slice.tuples.size() << " tuples, "
            << result.composition.knowledge << " knowledge, "
            << result.composition.interest << " interest\n";
}

void cmd_eval(const CommonOptions& common, const std::filesystem::path& slice_dir,
              const std::string& retriever, const std::string& ks,
              const std::filesystem::path& out_file) {
  RunConfig config = resolve_config(common);
  if (skip_existing(out_file, common.force)) return;
  StoreContext ctx = load_slice_dir(slice_dir);
  Taxonomy taxonomy = Taxonomy::load(config.taxonomy_file());

  auto violations = validate_slice(ctx.slice, ctx.kb, &taxonomy);
  if (!violations.empty()) {
    throw Error(ErrorKind::validation,
                "slice fails validation with " + std::to_string(violations.size()) +
                    " violations; first: " + violations.front().tuple_id + " " +
                    violations.front().rule);
  }

  if (config.eval_prepend_persona) {
    // Query composition switch: persona description ahead of the question.
    std::map<std::string, std::string> persona_text;
    const auto personas_file =
        ctx.store.root() / "assets" / "personas.jsonl";
    if (std::filesystem::exists(personas_file)) {
      for (const auto& p : load_personas(personas_file)) {
        persona_text[p.persona_id] = p.description;
      }
    }
    for (auto& t : ctx.slice.tuples) {
      if (t.persona_id && persona_text.count(*t.persona_id)) {
        t.question = persona_text[*t.persona_id] + "\n" + t.question;
      }
    }
  }

  ProviderSet providers = make_providers(config);
  std::shared_ptr<Bm25Index> bm25_holder;
  std::shared_ptr<VectorIndex> dense_holder;
  RetrieverFn fn = make_retriever(retriever, ctx.kb, config, *providers.embedding,
                                  bm25_holder, dense_holder);

  nlohmann::json out;
  out["slice"] = ctx.slice.index;
  out["kb_version"] = ctx.slice.kb_version;
  out["retriever"] = retriever;
  nlohmann::json results = nlohmann::json::object();
  for (const auto& k_str : split_csv(ks)) {
    const std::size_t k = std::stoul(k_str);
    results[k_str] = to_json(evaluate_phase(ctx.slice, fn, k, config.jobs));
  }
  out["results"] = results;
  write_json_file(out_file, out);
  std::cout << "evaluated slice " << ctx.slice.index << " with " << retriever << " @ {"
            << ks << "} -> " << out_file.string() << "\n";
}

void cmd_judge(const CommonOptions& common, const std::filesystem::path& slice_dir,
               const std::string& retriever, std::size_t k, const std::string& criteria,
               const std::filesystem::path& out_file) {
  RunConfig config = resolve_config(common);
  if (skip_existing(out_file, common.force)) return;
  StoreContext ctx = load_slice_dir(slice_dir);
  const auto wanted = split_csv(criteria);
  for (const auto& c : wanted) {
    if (c != "correctness" && c != "faithfulness") {
      throw Error(ErrorKind::config, "unknown criterion: " + c);
    }
  }
  if (wanted.empty()) {
    throw Error(ErrorKind::config, "at least one criterion is required");
  }

  ProviderSet providers = make_providers(config);
  PromptLibrary prompts(config.prompts_dir());
  std::shared_ptr<Bm25Index> bm25_holder;
  std::shared_ptr<VectorIndex> dense_holder;
  RetrieverFn fn = make_retriever(retriever, ctx.kb, config, *providers.embedding,
                                  bm25_holder, dense_holder);

  GenerationEval eval = generation_eval(ctx.slice, ctx.kb, fn, *providers.completion,
                                        *providers.completion, prompts, k, config.jobs);
  nlohmann::json out;
  out["slice"] = ctx.slice.index;
  out["retriever"] = retriever;
  out["k"] = k;
  out["criteria"] = wanted;
  nlohmann::json generation;
  generation["evaluated"] = eval.evaluated;
  generation["failed"] = eval.failed;
  for (const auto& c : wanted) {
    if (c == "correctness") generation["mean_correctness"] = eval.mean_correctness;
    if (c == "faithfulness") generation["mean_faithfulness"] = eval.mean_faithfulness;
  }
  out["generation"] = generation;
  write_json_file(out_file, out);
  std::cout << "judged slice " << ctx.slice.index << ": correctness "
            << eval.mean_correctness << ", faithfulness " << eval.mean_faithfulness
            << " -> " << out_file.string() << "\n";
}

void cmd_agreement(const std::filesystem::path& llm_file,
                   const std::filesystem::path& human_file,
                   const std::filesystem::path& selections_file,
                   const std::filesystem::path& out_file) {
  nlohmann::json out;
  if (!selections_file.empty()) {
    std::vector<std::pair<std::string, std::string>> selections;
    for (const auto& row : read_jsonl(selections_file)) {
      selections.emplace_back(row.at("id").get<std::string>(),
                              row.at("choice").get<std::string>());
    }
    out["win_rates"] = forced_choice_win_rates(selections);
    out["selections"] = selections.size();
    write_json_file(out_file, out);
    std::cout << "win rates over " << selections.size() << " selections -> "
              << out_file.string() << "\n";
    return;
  }
  if (llm_file.empty() || human_file.empty()) {
    throw Error(ErrorKind::config,
                "agreement needs --llm and --human, or --selections");
  }
  std::map<std::string, int> llm_raw;
  for (const auto& row : read_jsonl(llm_file)) {
    llm_raw[row.at("id").get<std::string>()] = row.at("raw").get<int>();
  }
  std::map<std::string, std::vector<int>> human_votes;
  for (const auto& row : read_jsonl(human_file)) {
    human_votes[row.at("id").get<std::string>()] =
        row.at("votes").get<std::vector<int>>();
  }
  std::vector<bool> llm_pass;
  std::vector<bool> human_pass;
  std::size_t max_raters = 0;
  for (const auto& [id, votes] : human_votes) max_raters = std::max(max_raters, votes.size());
  std::vector<std::vector<std::optional<int>>> ratings(max_raters);
  for (const auto& [id, raw] : llm_raw) {
    auto it = human_votes.find(id);
    if (it == human_votes.end()) {
      throw Error(ErrorKind::contract, "no human votes for id " + id);
    }
    llm_pass.push_back(lenient_pass(raw));
    human_pass.push_back(majority_pass(it->second));
    for (std::size_t r = 0; r < max_raters; ++r) {
      ratings[r].push_back(r < it->second.size()
                               ? std::optional<int>(it->second[r])
                               : std::nullopt);
    }
  }
  out["agreement"] = to_json(agreement(llm_pass, human_pass));
  out["items"] = llm_pass.size();
  if (max_raters >= 2) {
    out["krippendorff_alpha"] = krippendorff_alpha(ratings);
  }
  write_json_file(out_file, out);
  std::cout << "agreement over " << llm_pass.size() << " items -> " << out_file.string()
            << "\n";
}

void cmd_report(const CommonOptions& common, const std::filesystem::path& store_dir,
                const std::filesystem::path& out_file,
                const std::filesystem::path& csv_file) {
  if (skip_existing(out_file, common.force)) return;
  BenchmarkStore store(store_dir);
  auto indices = store.slice_indices();
  if (indices.empty()) {
    throw Error(ErrorKind::validation, "store has no slices: " + store_dir.string());
  }
  nlohmann::json out;
  nlohmann::json slices = nlohmann::json::array();
  std::vector<std::string> csv_rows;
  csv_rows.push_back(
      "slice,phase_start,tuples,inherited,knowledge_update,interest_update,"
      "retriever,k,recall,precision,f1,ndcg");
  for (int index : indices) {
    BenchmarkSlice slice = store.load_slice(index);
    nlohmann::json entry;
    entry["index"] = index;
    entry["phase_start"] = slice.phase_start;
    entry["tuples"] = slice.tuples.size();
    entry["kb_version"] = slice.kb_version;
    Composition comp = slice_composition(slice);
    entry["composition"] = comp.to_json();
    try {
      entry["update_report"] = store.load_report(index);
    } catch (const Error&) {
      // older slices may predate report writing
    }
    // Pull in any evaluation or judge outputs dropped next to the slice.
    nlohmann::json evals = nlohmann::json::object();
    std::vector<std::filesystem::path> eval_files;
    for (const auto& file : std::filesystem::directory_iterator(store.slice_dir(index))) {
      const std::string name = file.path().filename().string();
      if (name.rfind("eval_", 0) == 0 || name.rfind("judge_", 0) == 0) {
        eval_files.push_back(file.path());
      }
    }
    std::sort(eval_files.begin(), eval_files.end());
    for (const auto& file : eval_files) {
      std::ifstream in(file);
      nlohmann::json j;
      in >> j;
      evals[file.stem().string()] = j;
      if (j.contains("results")) {
        for (const auto& [k_str, phase] : j["results"].items()) {
          const auto& mean = phase["mean"];
          const double n = std::max<double>(1.0, static_cast<double>(comp.total()));
          std::ostringstream row;
          row << index << ',' << slice.phase_start << ',' << comp.total() << ','
              << static_cast<double>(comp.inherited) / n << ','
              << static_cast<double>(comp.knowledge) / n << ','
              << static_cast<double>(comp.interest) / n << ','
              << j.value("retriever", "") << ',' << k_str << ','
              << mean.value("recall", 0.0) << ',' << mean.value("precision", 0.0) << ','
              << mean.value("f1", 0.0) << ',' << mean.value("ndcg", 0.0);
          csv_rows.push_back(row.str());
        }
      }
    }
    entry["evaluations"] = evals;
    slices.push_back(entry);
  }
  out["slices"] = slices;
  write_json_file(out_file, out);
  if (!csv_file.empty()) {
    std::ofstream csv(csv_file, std::ios::trunc);
    for (const auto& row : csv_rows) csv << row << '\n';
  }
  std::cout << "report over " << indices.size() << " slices -> " << out_file.string()
            << "\n";
}

}  // namespace chronoplay::cli
