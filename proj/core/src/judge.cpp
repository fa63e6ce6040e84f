#include "chronoplay/judge.hpp"

#include <algorithm>
#include <cmath>

namespace chronoplay {

JudgeVerdict judge_answer(const std::string& question,
                          const std::vector<std::string>& contexts,
                          const std::string& answer, JudgeCriterion criterion,
                          CompletionProvider& provider, const PromptLibrary& prompts) {
  const bool correctness = criterion == JudgeCriterion::correctness;
  if (!correctness && contexts.empty()) {
    throw Error(ErrorKind::contract, "faithfulness judging requires contexts");
  }
  CompletionRequest request;
  request.system_prompt = correctness
                              ? "TASK:JUDGE_CORRECTNESS\nYou score answer accuracy."
                              : "TASK:JUDGE_FAITHFULNESS\nYou score answer grounding.";
  request.user_prompt =
      fill_placeholders(prompts.get(correctness ? "judge/correctness"
                                                : "judge/faithfulness"),
                        {{"[Question]", question},
                         {"[Documents]", render_document_texts(contexts)},
                         {"[Answer]", answer}});
  request.expect = ExpectKind::json_object;
  const char* field = correctness ? "accuracy" : "faithfulness";
  for (int attempt = 0; attempt < 2; ++attempt) {
    nlohmann::json out;
    try {
      out = complete_json(provider, request, 1);
    } catch (const Error&) {
      continue;
    }
    if (out.contains(field) && out[field].is_number_integer()) {
      const int raw = out[field].get<int>();
      if (raw >= 0 && raw <= 2) {
        return JudgeVerdict{criterion, raw, static_cast<double>(raw) / 2.0};
      }
    }
  }
  throw Error(ErrorKind::judge, std::string("judge output invalid for ") + field +
                                    " after one retry");
}

bool lenient_pass(int raw) {
  if (raw < 0 || raw > 2) {
    throw Error(ErrorKind::contract, "lenient mapping input must be in {0,1,2}");
  }
  return raw >= 1;
}

bool majority_pass(const std::vector<int>& votes) {
  if (votes.empty()) {
    throw Error(ErrorKind::contract, "majority vote over zero votes");
  }
  std::size_t pass = 0;
  for (int v : votes) {
    if (v != 0 && v != 1) {
      throw Error(ErrorKind::contract, "votes must be binary");
    }
    pass += static_cast<std::size_t>(v);
  }
  return pass * 2 > votes.size();  // ties break toward fail
}

AgreementTable agreement(const std::vector<bool>& llm_pass,
                         const std::vector<bool>& human_pass) {
  if (llm_pass.size() != human_pass.size() || llm_pass.empty()) {
    throw Error(ErrorKind::contract, "agreement requires equal non-empty lists");
  }
  AgreementTable t;
  for (std::size_t i = 0; i < llm_pass.size(); ++i) {
    if (llm_pass[i] && human_pass[i]) ++t.tp;
    else if (llm_pass[i] && !human_pass[i]) ++t.fp;
    else if (!llm_pass[i] && human_pass[i]) ++t.fn;
    else ++t.tn;
  }
  const double n = static_cast<double>(llm_pass.size());
  t.accuracy = static_cast<double>(t.tp + t.tn) / n;
  t.precision = (t.tp + t.fp) > 0
                    ? static_cast<double>(t.tp) / static_cast<double>(t.tp + t.fp)
                    : 0.0;
  t.recall = (t.tp + t.fn) > 0
                 ? static_cast<double>(t.tp) / static_cast<double>(t.tp + t.fn)
                 : 0.0;
  t.f1 = (t.precision + t.recall) > 0.0
             ? 2.0 * t.precision * t.recall / (t.precision + t.recall)
             : 0.0;
  return t;
}

double krippendorff_alpha(const std::vector<std::vector<std::optional<int>>>& ratings) {
  if (ratings.size() < 2) {
    throw Error(ErrorKind::contract, "krippendorff_alpha requires >= 2 raters");
  }
  const std::size_t items = ratings.front().size();
  for (const auto& row : ratings) {
    if (row.size() != items) {
      throw Error(ErrorKind::contract, "ragged ratings matrix");
    }
  }
  // Coincidence matrix over ordered value pairs within each unit; each pair
  // weighs 1/(m_u - 1).
  std::map<std::pair<int, int>, double> coincidence;
  std::map<int, double> value_totals;
  double n_total = 0.0;
  for (std::size_t item = 0; item < items; ++item) {
    std::vector<int> values;
    for (const auto& row : ratings) {
      if (row[item]) values.push_back(*row[item]);
    }
    const std::size_t m = values.size();
    if (m < 2) continue;
    const double w = 1.0 / static_cast<double>(m - 1);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (i == j) continue;
        coincidence[{values[i], values[j]}] += w;
      }
    }
  }
  for (const auto& [pair, count] : coincidence) {
    value_totals[pair.first] += count;
    n_total += count;
  }
  if (n_total < 2.0) {
    throw Error(ErrorKind::contract,
                "krippendorff_alpha undefined: fewer than two paired values");
  }
  double observed = 0.0;
  for (const auto& [pair, count] : coincidence) {
    if (pair.first != pair.second) observed += count;
  }
  double expected = 0.0;
  for (const auto& [c, nc] : value_totals) {
    for (const auto& [k, nk] : value_totals) {
      if (c != k) expected += nc * nk;
    }
  }
  expected /= n_total * (n_total - 1.0);
  const double d_o = observed / n_total;
  if (expected == 0.0) return 1.0;  // every paired value identical
  return 1.0 - d_o / expected;
}

const std::vector<std::string> kForcedChoiceVariants = {"full", "no_hypo", "no_persona",
                                                        "no_template"};

std::map<std::string, double> forced_choice_win_rates(
    const std::vector<std::pair<std::string, std::string>>& selections) {
  if (selections.empty()) {
    throw Error(ErrorKind::validation, "no forced-choice selections");
  }
  std::map<std::string, std::size_t> wins;
  for (const auto& variant : kForcedChoiceVariants) wins[variant] = 0;
  for (const auto& [id, variant] : selections) {
    auto it = wins.find(variant);
    if (it == wins.end()) {
      throw Error(ErrorKind::validation, "unknown variant label: " + variant);
    }
    ++it->second;
  }
  std::map<std::string, double> rates;
  for (const auto& [variant, count] : wins) {
    rates[variant] = static_cast<double>(count) / static_cast<double>(selections.size());
  }
  return rates;
}

GenerationEval generation_eval(const BenchmarkSlice& slice, const KnowledgeBase& kb,
                               const RetrieverFn& retriever,
                               CompletionProvider& generator,
                               CompletionProvider& judge_provider,
                               const PromptLibrary& prompts, std::size_t k, int jobs) {
  GenerationEval eval;
  const std::size_t n = slice.tuples.size();
  struct PerTuple {
    bool ok = false;
    double correctness = 0.0;
    double faithfulness = 0.0;
  };
  std::vector<PerTuple> results(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    const EvalTuple& t = slice.tuples[i];
    try {
      std::vector<std::string> contexts;
      for (const auto& id : retriever(t.question, k)) {
        if (const KnowledgeSnippet* s = kb.find(id)) contexts.push_back(s->content);
      }
      CompletionRequest gen;
      gen.system_prompt = "TASK:GENERATE\nYou answer player questions from contexts.";
      gen.user_prompt = fill_placeholders(prompts.get("judge/generator"),
                                          {{"[Question]", t.question},
                                           {"[Documents]", render_document_texts(contexts)}});
      const std::string answer = generator.complete(gen);
      const JudgeVerdict correctness = judge_answer(
          t.question, contexts, answer, JudgeCriterion::correctness, judge_provider, prompts);
      const JudgeVerdict faithfulness = judge_answer(
          t.question, contexts, answer, JudgeCriterion::faithfulness, judge_provider, prompts);
      results[i] = {true, correctness.normalized, faithfulness.normalized};
    } catch (const Error&) {
      results[i].ok = false;  // recorded, excluded from means
    }
  });
  double sum_c = 0.0;
  double sum_f = 0.0;
  for (const auto& r : results) {
    if (!r.ok) {
      ++eval.failed;
      continue;
    }
    ++eval.evaluated;
    sum_c += r.correctness;
    sum_f += r.faithfulness;
  }
  if (eval.evaluated > 0) {
    eval.mean_correctness = sum_c / static_cast<double>(eval.evaluated);
    eval.mean_faithfulness = sum_f / static_cast<double>(eval.evaluated);
  }
  return eval;
}

nlohmann::json to_json(const AgreementTable& t) {
  nlohmann::json j;
  j["confusion"] = {{"tp", t.tp}, {"fp", t.fp}, {"fn", t.fn}, {"tn", t.tn}};
  j["accuracy"] = t.accuracy;
  j["precision"] = t.precision;
  j["recall"] = t.recall;
  j["f1"] = t.f1;
  return j;
}

nlohmann::json to_json(const GenerationEval& e) {
  nlohmann::json j;
  j["evaluated"] = e.evaluated;
  j["failed"] = e.failed;
  j["mean_correctness"] = e.mean_correctness;
  j["mean_faithfulness"] = e.mean_faithfulness;
  return j;
}

}  // namespace chronoplay
