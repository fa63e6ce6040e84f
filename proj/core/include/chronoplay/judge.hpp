#pragma once
// LLM-as-judge scoring (3-level rubrics, normalization, lenient pass/fail
// mapping), human-agreement statistics, Krippendorff's alpha, and
// forced-choice win rates.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chronoplay/model.hpp"
#include "chronoplay/prompts.hpp"
#include "chronoplay/providers.hpp"
#include "chronoplay/rag_eval.hpp"

namespace chronoplay {

enum class JudgeCriterion { correctness, faithfulness };

struct JudgeVerdict {
  JudgeCriterion criterion;
  int raw = 0;             // in {0, 1, 2}
  double normalized = 0.0;  // raw / 2
};

// Issues the rubric prompt for the criterion, parses {"accuracy": s} or
// {"faithfulness": s}, validates s in {0,1,2} with one retry.
JudgeVerdict judge_answer(const std::string& question,
                          const std::vector<std::string>& contexts,
                          const std::string& answer, JudgeCriterion criterion,
                          CompletionProvider& provider, const PromptLibrary& prompts);

// {1,2} -> pass, {0} -> fail; out of range is a contract error.
bool lenient_pass(int raw);

// Majority vote over binary votes; even-split ties break toward fail.
bool majority_pass(const std::vector<int>& votes);

struct AgreementTable {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  double accuracy = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0;
};

// Pass is the positive class. Precision/recall with an empty denominator
// are defined as 0.
AgreementTable agreement(const std::vector<bool>& llm_pass,
                         const std::vector<bool>& human_pass);

// Nominal Krippendorff's alpha via the coincidence matrix, tolerating
// missing ratings (nullopt). All-identical values give 1.0 by convention;
// fewer than two paired values in total is an error.
double krippendorff_alpha(const std::vector<std::vector<std::optional<int>>>& ratings);

// Win rate per variant over forced-choice selections
// (instance id, chosen variant). Rates sum to 1.
extern const std::vector<std::string> kForcedChoiceVariants;
std::map<std::string, double> forced_choice_win_rates(
    const std::vector<std::pair<std::string, std::string>>& selections);

struct GenerationEval {
  std::size_t evaluated = 0;
  std::size_t failed = 0;
  double mean_correctness = 0.0;
  double mean_faithfulness = 0.0;
};

// For each tuple: retrieve top-k contexts, generate an answer, judge both
// criteria; per-tuple failures are recorded and excluded from the means.
GenerationEval generation_eval(const BenchmarkSlice& slice, const KnowledgeBase& kb,
                               const RetrieverFn& retriever,
                               CompletionProvider& generator,
                               CompletionProvider& judge_provider,
                               const PromptLibrary& prompts, std::size_t k = 3,
                               int jobs = 1);

nlohmann::json to_json(const AgreementTable& t);
nlohmann::json to_json(const GenerationEval& e);

}  // namespace chronoplay
