// Deterministic mock completion backend.
//
// Every handler is a pure function of (system_prompt, user_prompt, seed).
// The task is selected by a TASK:<NAME> marker in the system prompt. Seed
// material is h = fnv1a64(user_prompt) XOR seed (request seed when present,
// otherwise the provider's base seed); word picks are
// fixture_words[fnv1a64(key, h) % N].
//
// Rule table (marker -> output schema and rule):
//   TASK:CLASSIFY       {"topic":"MAIN/SUB"}. Keyword table applied to the
//                       "Question:" line; falls back to a seeded pick from
//                       the MAIN/SUB lines listed in the prompt.
//                       MOCK_CLASSIFY_INVALID forces an off-taxonomy topic.
//   TASK:TEMPLATE       {"templates":[{template,placeholders,description} x2]}
//                       built from 4 fixed forms with two seeded salt words
//                       plus the prompt's sub-category words.
//                       MOCK_TEMPLATE_MANY -> 4 templates,
//                       MOCK_TEMPLATE_BAD -> inconsistent placeholder list,
//                       MOCK_TEMPLATE_NOPH -> one placeholder-free template.
//   TASK:PERSONA        {"player_description","confidence_score"}. Null with
//                       score 0.0 when the "Question:" line is shorter than
//                       40 chars or MOCK_PERSONA_NULL is present;
//                       MOCK_PERSONA_CONF=<x> overrides the score (default 0.8).
//   TASK:NER_PSEUDO_INPUTS {"pseudo_inputs":[...]}, count parsed from
//                       "generate <n> similar"; seeded title-case sentences.
//   TASK:NER_PSEUDO_LABELS / TASK:NER {"entities":[{text,type,context}]}.
//                       Entities are maximal runs of capitalized words
//                       (function words excluded; digit tokens may continue
//                       a run) in the "Text:" / "Test Input:" line.
//   TASK:HYPO_QA        {"question","answer"}. Question = the "Question
//                       Template:" line with [NAME] placeholders replaced by
//                       seeded words ([GAME_NAME] uses the game name parsed
//                       from the prompt). MOCK_HYPO_KEEP_PLACEHOLDER leaves
//                       non-game placeholders unresolved.
//   TASK:SYNTH          "###THOUGHT_PROCESS###...<json>[{question,answer,
//                       references}]</json>". Question as in HYPO_QA;
//                       references are verbatim prefixes of each provided
//                       document; the answer embeds a seed token so distinct
//                       calls yield distinct tuples. MOCK_SYNTH_EMPTY -> empty
//                       list; MOCK_SYNTH_BAD_REF -> a reference matching no
//                       document. No parsable documents -> empty list.
//   TASK:QC             {"evaluation":n}. 0 when the candidate question (the
//                       "question" field inside the prompt) starts with a
//                       yes/no interrogative, else 2. MOCK_QC_FORCE=<n>
//                       overrides (out-of-range values pass through).
//   TASK:JUDGE_CORRECTNESS / TASK:JUDGE_FAITHFULNESS
//                       {"accuracy":n} / {"faithfulness":n}. 0 when the
//                       "Predicted Answer:" section is empty, 1 when it
//                       contains "unsure", else 2. MOCK_SCORE=<n> overrides.
//   TASK:GENERATE       free text: prefix of the first provided document, or
//                       a fixed refusal when no documents are present.

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "chronoplay/providers.hpp"

namespace chronoplay {

const std::vector<std::string>& mock_fixture_words() {
  static const std::vector<std::string> words = {
      "stamina",    "grappling", "volatile",   "nightfall", "crossbow",
      "parkour",    "biomarker", "safehouse",  "windmill",  "inhibitor",
      "trophy",     "paraglider", "stash",     "crafting",  "durability",
      "bounty",     "arena",     "caravan",    "spice",     "shield",
      "outpost",    "sandworm",  "stillsuit",  "ornithopter", "recon",
      "airdrop",    "armory",    "compound",   "zipline",   "mutation",
      "medkit",     "lockpick",
  };
  return words;
}

namespace {

std::string pick_word(std::uint64_t h, std::string_view key) {
  const auto& words = mock_fixture_words();
  return words[fnv1a64(key, h) % words.size()];
}

std::string title_case(std::string word) {
  if (!word.empty()) word[0] = static_cast<char>(std::toupper(word[0]));
  return word;
}

// Remainder of the first line containing `marker`, after the marker.
std::optional<std::string> line_after(const std::string& text, const std::string& marker) {
  auto pos = text.find(marker);
  if (pos == std::string::npos) return std::nullopt;
  auto start = pos + marker.size();
  auto end = text.find('\n', start);
  if (end == std::string::npos) end = text.size();
  return trim(std::string_view(text).substr(start, end - start));
}

// The hypothetical-QA prompt names the game in running text ending with a
// period; strip it.
std::string parse_game_name(const std::string& text) {
  std::string name = line_after(text, "game name ").value_or("");
  if (!name.empty() && name.back() == '.') name.pop_back();
  return trim(name);
}

struct MockDocument {
  std::string id;
  std::string content;
};

// Parses the "Document k (id=...):" blocks emitted by render_documents().
std::vector<MockDocument> parse_documents(const std::string& text) {
  std::vector<MockDocument> docs;
  static const std::regex header(R"(^Document \d+ \(id=(.+)\):$)");
  std::string current;
  bool in_doc = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos
                                                                 : eol - pos);
    std::smatch m;
    if (std::regex_match(line, m, header)) {
      docs.push_back({m[1].str(), ""});
      in_doc = true;
    } else if (line == "End of documents.") {
      in_doc = false;
    } else if (in_doc && !docs.empty()) {
      if (!docs.back().content.empty()) docs.back().content += '\n';
      docs.back().content += line;
    }
    if (eol == std::string::npos) break;
    pos = eol + 1;
  }
  for (auto& d : docs) d.content = trim(d.content);
  return docs;
}

const std::set<std::string>& function_words() {
  static const std::set<std::string> words = {
      "The", "A",  "An", "This", "That", "These", "Those", "It", "Its", "I",
      "We", "You", "Your", "My", "Our", "If", "In", "On", "At", "For", "And",
      "Or", "But", "Is", "Are", "Was", "Were", "Be", "Do", "Does", "Did",
      "Will", "Would", "Can", "Could", "Should", "How", "What", "When",
      "Where", "Why", "Which", "Who", "Whom", "Please", "Now", "Here",
      "There", "Not", "No", "Yes", "To", "Of", "With", "From", "As", "By",
      "After", "Before", "So", "Then", "Than",
  };
  return words;
}

std::string strip_punct(const std::string& token) {
  std::size_t b = 0;
  std::size_t e = token.size();
  while (b < e && !std::isalnum(static_cast<unsigned char>(token[b]))) ++b;
  while (e > b && !std::isalnum(static_cast<unsigned char>(token[e - 1]))) --e;
  return token.substr(b, e - b);
}

// Maximal runs of capitalized words; digit tokens may continue a run;
// sentence punctuation ends the run it follows.
std::vector<std::string> caps_run_entities(const std::string& text) {
  struct Token {
    std::string word;
    bool ends_sentence;
  };
  std::vector<Token> tokens;
  std::string cur;
  auto push = [&]() {
    if (cur.empty()) return;
    const char last = cur.back();
    tokens.push_back({strip_punct(cur),
                      last == '.' || last == '!' || last == '?' || last == ';' ||
                          last == ':' || last == ','});
    cur.clear();
  };
  for (char c : text + " ") {
    if (std::isspace(static_cast<unsigned char>(c))) {
      push();
    } else {
      cur.push_back(c);
    }
  }
  std::vector<std::string> entities;
  std::set<std::string> seen;
  std::vector<std::string> run;
  auto flush = [&]() {
    if (run.empty()) return;
    std::string joined;
    for (std::size_t i = 0; i < run.size(); ++i) {
      if (i) joined += ' ';
      joined += run[i];
    }
    std::string key = to_lower(joined);
    if (seen.insert(key).second) entities.push_back(joined);
    run.clear();
  };
  for (const auto& tok : tokens) {
    if (tok.word.empty()) {
      flush();
      continue;
    }
    const bool cap = std::isupper(static_cast<unsigned char>(tok.word[0])) != 0;
    const bool numeric =
        std::all_of(tok.word.begin(), tok.word.end(), [](unsigned char c) {
          return std::isdigit(c) || c == '.';
        });
    if (cap && !function_words().count(tok.word)) {
      run.push_back(tok.word);
    } else if (numeric && !run.empty()) {
      run.push_back(tok.word);
    } else {
      flush();
    }
    if (tok.ends_sentence) flush();
  }
  flush();
  return entities;
}

// [NAME] placeholder substitution shared by HYPO_QA and SYNTH.
std::string substitute_placeholders(const std::string& tmpl, const std::string& game_name,
                                    std::uint64_t h, bool keep_non_game) {
  std::string out;
  std::size_t pos = 0;
  static const std::regex ph(R"(\[([A-Z][A-Z0-9_]*)\])");
  auto begin = std::sregex_iterator(tmpl.begin(), tmpl.end(), ph);
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    out += tmpl.substr(pos, static_cast<std::size_t>(m.position()) - pos);
    const std::string name = m[1].str();
    if (name == "GAME_NAME") {
      out += game_name.empty() ? "the game" : game_name;
    } else if (keep_non_game) {
      out += m[0].str();
    } else {
      out += pick_word(h, name);
    }
    pos = static_cast<std::size_t>(m.position() + m.length());
  }
  out += tmpl.substr(pos);
  return out;
}

std::optional<int> parse_marker_int(const std::string& text, const std::string& marker) {
  auto pos = text.find(marker);
  if (pos == std::string::npos) return std::nullopt;
  pos += marker.size();
  std::size_t end = pos;
  if (end < text.size() && (text[end] == '-' || text[end] == '+')) ++end;
  while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
  if (end == pos) return std::nullopt;
  return std::stoi(text.substr(pos, end - pos));
}

std::string classify_rule(const std::string& user_prompt, std::uint64_t h) {
  if (user_prompt.find("MOCK_CLASSIFY_INVALID") != std::string::npos) {
    return "BOGUS/NOPE";
  }
  std::string question = to_lower(line_after(user_prompt, "Question:").value_or(""));
  static const std::vector<std::pair<std::vector<std::string>, std::string>> table = {
      {{"gtx", "rtx", "run this", "requirement", "specs"},
       "TECHNICAL_SUPPORT/SYSTEM_REQUIREMENTS"},
      {{"crash", "freeze", "black screen"}, "TECHNICAL_SUPPORT/CRASH_ERRORS"},
      {{"fps", "lag", "stutter", "optimiz"}, "TECHNICAL_SUPPORT/PERFORMANCE_ISSUES"},
      {{"server", "disconnect", "latency", "ping"},
       "TECHNICAL_SUPPORT/NETWORK_CONNECTION"},
      {{"preorder", "pre-order", "pre order"}, "PURCHASE_RELATED/PREORDER_REWARDS"},
      {{"worth", "should i buy", "price"}, "PURCHASE_RELATED/PURCHASE_CONSULTATION"},
      {{"deluxe", "edition"}, "PURCHASE_RELATED/VERSION_COMPARISON"},
      {{"which platform", "steam or", "console or"},
       "PURCHASE_RELATED/PLATFORM_SELECTION"},
      {{"refund"}, "AFTER_SALES_SERVICE/REFUND_POLICY"},
      {{"customer service", "support ticket"}, "AFTER_SALES_SERVICE/CUSTOMER_SUPPORT"},
      {{"account", "login", "activation"}, "AFTER_SALES_SERVICE/ACCOUNT_ISSUES"},
      {{"teammate", "co-op", "coop", "play with"},
       "SOCIAL_INTERACTION/TEAM_COOPERATION"},
      {{"friend"}, "SOCIAL_INTERACTION/FRIEND_SYSTEM"},
      {{"tournament", "community event"}, "SOCIAL_INTERACTION/COMMUNITY_EVENTS"},
      {{"patch", "update"}, "GAME_CONTENT/VERSION_UPDATES"},
      {{"guide", "how do i", "best way", "tips"}, "GAME_CONTENT/PROGRESS_GUIDE"},
      {{"story", "game mode", "map size"}, "GAME_CONTENT/CONTENT_FEATURES"},
      {{"controls", "mechanic", "how does"}, "GAME_CONTENT/GAMEPLAY_MECHANICS"},
      {{"review", "rating"}, "REVIEW_DISCUSSION/REVIEW_QUESTIONS"},
      {{"compared to", " vs "}, "REVIEW_DISCUSSION/COMPARISON_DISCUSSION"},
      {{"hope", "worried", "roadmap"}, "REVIEW_DISCUSSION/EXPECTATION_CONCERN"},
  };
  for (const auto& [keywords, topic] : table) {
    for (const auto& kw : keywords) {
      if (question.find(kw) != std::string::npos) return topic;
    }
  }
  // Fall back to a seeded pick from the MAIN/SUB lines in the prompt.
  std::vector<std::string> leaves;
  static const std::regex leaf(R"(^([A-Z][A-Z_]*/[A-Z][A-Z_]*)$)");
  std::size_t pos = 0;
  while (pos <= user_prompt.size()) {
    auto eol = user_prompt.find('\n', pos);
    std::string line = trim(user_prompt.substr(
        pos, eol == std::string::npos ? std::string::npos : eol - pos));
    if (std::regex_match(line, leaf)) leaves.push_back(line);
    if (eol == std::string::npos) break;
    pos = eol + 1;
  }
  if (leaves.empty()) return "GAME_CONTENT/GAMEPLAY_MECHANICS";
  return leaves[fnv1a64("fallback", h) % leaves.size()];
}

nlohmann::json template_rule(const std::string& user_prompt, std::uint64_t h) {
  struct Form {
    const char* text;
    std::vector<std::string> placeholders;
  };
  static const std::vector<Form> forms = {
      {"What is the best [ITEM] plan for {s1} {s2} and other {topic} questions in "
       "[GAME_NAME]?",
       {"ITEM", "GAME_NAME"}},
      {"How do I handle the {s1} {s2} side of {topic} with [ITEM] after the [VERSION] "
       "update?",
       {"ITEM", "VERSION"}},
      {"Which [PLATFORM] option covers {topic} like {s1} {s2} better in [GAME_NAME]?",
       {"PLATFORM", "GAME_NAME"}},
      {"Where do players sort out {topic} near {s1} {s2} spots for [ITEM] in "
       "[LOCATION]?",
       {"ITEM", "LOCATION"}},
  };
  const std::string s1 = pick_word(h, "s1");
  const std::string s2 = pick_word(h, "s2");
  // The topic's sub-category words anchor each template to its topic so that
  // mined bases keep per-topic coverage through dedup.
  std::string topic_words = "general play";
  if (auto topic_line = line_after(user_prompt, "Question Topic:")) {
    auto slash = topic_line->find('/');
    if (slash != std::string::npos) {
      topic_words = to_lower(topic_line->substr(slash + 1));
      for (auto& c : topic_words) {
        if (c == '_') c = ' ';
      }
    }
  }
  auto render = [&](const Form& form, int variant) {
    std::string text = form.text;
    auto replace_all = [&](const std::string& from, const std::string& to) {
      std::size_t p = 0;
      while ((p = text.find(from, p)) != std::string::npos) {
        text.replace(p, from.size(), to);
        p += to.size();
      }
    };
    replace_all("{s1}", s1);
    replace_all("{s2}", s2);
    replace_all("{topic}", topic_words);
    nlohmann::json t;
    t["template"] = text;
    t["placeholders"] = form.placeholders;
    t["description"] =
        "Mined pattern " + std::to_string(variant) + " around " + s1 + " " + s2 + ".";
    return t;
  };
  nlohmann::json out;
  out["templates"] = nlohmann::json::array();
  if (user_prompt.find("MOCK_TEMPLATE_BAD") != std::string::npos) {
    nlohmann::json t;
    t["template"] = "Does [ROGUE] change anything for [ITEM]?";
    t["placeholders"] = std::vector<std::string>{"ITEM"};
    t["description"] = "Inconsistent placeholder fixture.";
    out["templates"].push_back(t);
    return out;
  }
  if (user_prompt.find("MOCK_TEMPLATE_NOPH") != std::string::npos) {
    nlohmann::json t;
    t["template"] = "What makes this game stand out overall?";
    t["placeholders"] = nlohmann::json::array();
    t["description"] = "Placeholder-free fixture.";
    out["templates"].push_back(t);
    return out;
  }
  const std::size_t count =
      user_prompt.find("MOCK_TEMPLATE_MANY") != std::string::npos ? 4 : 2;
  const std::size_t base = fnv1a64("form", h) % forms.size();
  for (std::size_t i = 0; i < count; ++i) {
    out["templates"].push_back(
        render(forms[(base + i) % forms.size()], static_cast<int>(i)));
  }
  return out;
}

nlohmann::json persona_rule(const std::string& user_prompt, std::uint64_t h) {
  nlohmann::json out;
  const std::string question = line_after(user_prompt, "Question:").value_or("");
  if (user_prompt.find("MOCK_PERSONA_NULL") != std::string::npos || question.size() < 40) {
    out["player_description"] = nullptr;
    out["confidence_score"] = 0.0;
    return out;
  }
  double confidence = 0.8;
  static const std::regex conf_re(R"(MOCK_PERSONA_CONF=([0-9]*\.?[0-9]+))");
  std::smatch cm;
  if (std::regex_search(user_prompt, cm, conf_re)) confidence = std::stod(cm[1].str());
  out["player_description"] = "You are a player who values " + pick_word(h, "pa") +
                              " and " + pick_word(h, "pb") +
                              ", with most sessions spent around " + pick_word(h, "pc") +
                              " challenges.";
  out["confidence_score"] = confidence;
  return out;
}

nlohmann::json entities_json(const std::vector<std::string>& entities) {
  nlohmann::json out;
  out["entities"] = nlohmann::json::array();
  for (const auto& e : entities) {
    out["entities"].push_back(
        nlohmann::json{{"text", e}, {"type", "ITEM"}, {"context", ""}});
  }
  return out;
}

std::string synth_rule(const std::string& user_prompt, std::uint64_t h) {
  const std::string thought = "###THOUGHT_PROCESS###\nComposing one grounded sample.\n";
  auto docs = parse_documents(user_prompt);
  if (user_prompt.find("MOCK_SYNTH_EMPTY") != std::string::npos || docs.empty()) {
    return thought + "<json>\n[]\n</json>";
  }
  const std::string game = parse_game_name(user_prompt);
  std::string question;
  if (auto tmpl = line_after(user_prompt, "Question Template:"); tmpl && !tmpl->empty()) {
    question = substitute_placeholders(*tmpl, game, h, false);
  } else {
    question = "How does " + pick_word(h, "q1") + " interact with " +
               pick_word(h, "q2") + "?";
  }
  nlohmann::json item;
  item["question"] = question;
  item["answer"] = "According to the notes, " + docs[0].content.substr(0, 80) +
                   " [ref:" + hex64(fnv1a64("uniq", h)).substr(0, 8) + "]";
  nlohmann::json refs = nlohmann::json::array();
  if (user_prompt.find("MOCK_SYNTH_BAD_REF") != std::string::npos) {
    refs.push_back("segment that matches no provided document ZZZZZ");
  } else {
    for (const auto& d : docs) {
      refs.push_back(d.content.substr(0, std::min<std::size_t>(d.content.size(), 120)));
    }
  }
  item["references"] = refs;
  nlohmann::json list = nlohmann::json::array({item});
  return thought + "<json>\n" + list.dump() + "\n</json>";
}

int qc_rule(const std::string& user_prompt) {
  if (auto forced = parse_marker_int(user_prompt, "MOCK_QC_FORCE=")) return *forced;
  static const std::regex qfield(R"raw("question"\s*:\s*"((?:[^"\\]|\\.)*)")raw");
  std::smatch m;
  std::string question;
  if (std::regex_search(user_prompt, m, qfield)) question = to_lower(m[1].str());
  static const std::vector<std::string> yes_no = {
      "is ", "are ", "was ", "were ", "does ", "do ", "did ",
      "can ", "could ", "will ", "would ", "should ", "has ", "have ", "am ",
  };
  if (starts_with_any(question, yes_no)) return 0;
  return 2;
}

int judge_rule(const std::string& user_prompt) {
  if (auto forced = parse_marker_int(user_prompt, "MOCK_SCORE=")) return *forced;
  auto pos = user_prompt.find("Predicted Answer:");
  std::string answer;
  if (pos != std::string::npos) {
    auto end = user_prompt.find("Return your evaluation", pos);
    answer = trim(user_prompt.substr(pos + 17, end == std::string::npos
                                                   ? std::string::npos
                                                   : end - pos - 17));
  }
  if (answer.empty()) return 0;
  if (to_lower(answer).find("unsure") != std::string::npos) return 1;
  return 2;
}

}  // namespace

std::string MockCompletionProvider::complete(const CompletionRequest& request) {
  static const std::regex task_re(R"(TASK:([A-Z_]+))");
  std::smatch m;
  if (!std::regex_search(request.system_prompt, m, task_re)) {
    throw Error(ErrorKind::config,
                "mock completion provider: no TASK: marker in system prompt");
  }
  const std::string task = m[1].str();
  const std::uint64_t h =
      fnv1a64(request.user_prompt) ^ request.seed.value_or(base_seed_);

  if (task == "CLASSIFY") {
    return nlohmann::json{{"topic", classify_rule(request.user_prompt, h)}}.dump();
  }
  if (task == "TEMPLATE") {
    return template_rule(request.user_prompt, h).dump();
  }
  if (task == "PERSONA") {
    return persona_rule(request.user_prompt, h).dump();
  }
  if (task == "NER_PSEUDO_INPUTS") {
    std::size_t count = 3;
    static const std::regex count_re(R"(generate (\d+) similar)");
    std::smatch cm;
    if (std::regex_search(request.user_prompt, cm, count_re)) {
      count = static_cast<std::size_t>(std::stoul(cm[1].str()));
    }
    nlohmann::json out;
    out["pseudo_inputs"] = nlohmann::json::array();
    for (std::size_t i = 0; i < count; ++i) {
      const std::string key = "p" + std::to_string(i);
      out["pseudo_inputs"].push_back(
          "The " + title_case(pick_word(h, key + "a")) + " " +
          title_case(pick_word(h, key + "b")) + " was adjusted near " +
          title_case(pick_word(h, key + "c")) + " last season.");
    }
    return out.dump();
  }
  if (task == "NER_PSEUDO_LABELS") {
    return entities_json(
               caps_run_entities(line_after(request.user_prompt, "Text:").value_or("")))
        .dump();
  }
  if (task == "NER") {
    return entities_json(caps_run_entities(
                             line_after(request.user_prompt, "Test Input:").value_or("")))
        .dump();
  }
  if (task == "HYPO_QA") {
    const std::string game = parse_game_name(request.user_prompt);
    const std::string tmpl =
        line_after(request.user_prompt, "Question Template:").value_or("");
    const bool keep =
        request.user_prompt.find("MOCK_HYPO_KEEP_PLACEHOLDER") != std::string::npos;
    nlohmann::json out;
    out["question"] = substitute_placeholders(tmpl, game, h, keep);
    out["answer"] = "For " + (game.empty() ? std::string("the game") : game) + ", " +
                    pick_word(h, "a1") + " and " + pick_word(h, "a2") +
                    " are what most players rely on here.";
    return out.dump();
  }
  if (task == "SYNTH") {
    return synth_rule(request.user_prompt, h);
  }
  if (task == "QC") {
    return nlohmann::json{{"evaluation", qc_rule(request.user_prompt)}}.dump();
  }
  if (task == "JUDGE_CORRECTNESS") {
    return nlohmann::json{{"accuracy", judge_rule(request.user_prompt)}}.dump();
  }
  if (task == "JUDGE_FAITHFULNESS") {
    return nlohmann::json{{"faithfulness", judge_rule(request.user_prompt)}}.dump();
  }
  if (task == "GENERATE") {
    auto docs = parse_documents(request.user_prompt);
    if (docs.empty()) return "I do not know based on the provided contexts.";
    return docs[0].content.substr(0, std::min<std::size_t>(docs[0].content.size(), 200));
  }
  throw Error(ErrorKind::config, "mock completion provider: unknown task " + task);
}

}  // namespace chronoplay
