#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ktl/qa/scoring.hpp"
#include "ktl/util/parallel.hpp"

namespace ktl::qa {

struct ItemResult {
  std::size_t chosen = 0;
  std::optional<std::size_t> label;
  std::vector<OptionScore> scores;
};

struct EvalReport {
  double accuracy = 0.0;
  std::size_t labeled = 0;
  std::size_t correct = 0;
  std::vector<ItemResult> items;                  // input order
  std::map<std::size_t, std::size_t> option_counts;  // options per item -> items
  std::vector<double> top_k_accuracy;             // [k-1] = gold within the k lowest scores
  std::vector<std::string> warnings;
  std::uint64_t seed = 0;
  std::string tie_break = "lowest-index";
};

// Rank of the gold option when options are ordered by (score, index).
inline std::size_t gold_rank(const std::vector<double>& scores, std::size_t gold) {
  std::size_t rank = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] < scores[gold] || (scores[i] == scores[gold] && i < gold)) ++rank;
  }
  return rank;
}

// Recomputes choices and accuracy from stored per-context distances using
// only the selected components.
inline EvalReport summarize(std::vector<ItemResult> items, Components components, std::uint64_t seed) {
  EvalReport report;
  report.seed = seed;
  std::size_t max_options = 0;
  for (const auto& it : items) max_options = std::max(max_options, it.scores.size());
  std::vector<std::size_t> within(max_options, 0);
  for (auto& it : items) {
    std::vector<double> s;
    for (const auto& o : it.scores) s.push_back(o.score(components));
    it.chosen = argmin(s);
    ++report.option_counts[it.scores.size()];
    if (!it.label) continue;
    ++report.labeled;
    if (it.chosen == *it.label) ++report.correct;
    const std::size_t rank = gold_rank(s, *it.label);
    for (std::size_t k = rank; k < max_options; ++k) ++within[k];
  }
  if (report.labeled == 0) fail(ErrorKind::kValidation, "evaluation needs at least one labeled item");
  const double n = static_cast<double>(report.labeled);
  report.accuracy = static_cast<double>(report.correct) / n;
  for (std::size_t c : within) report.top_k_accuracy.push_back(static_cast<double>(c) / n);
  report.items = std::move(items);
  return report;
}

// Scores every item (in parallel; results are stored by index).
inline std::vector<Answer> answer_all(const Scorer& scorer, const std::vector<QAItem>& items,
                                      const AnswerOptions& options = {}) {
  std::vector<Answer> answers(items.size());
  parallel_for(items.size(), [&](std::size_t i) { answers[i] = answer(scorer, items[i], i, options); });
  return answers;
}

inline EvalReport report_from_answers(const std::vector<QAItem>& items, std::vector<Answer> answers,
                                      Components components, std::uint64_t seed) {
  std::vector<ItemResult> results;
  std::size_t contextless = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (answers[i].warning) ++contextless;
    results.push_back({answers[i].chosen, items[i].label, std::move(answers[i].scores)});
  }
  EvalReport report = summarize(std::move(results), components, seed);
  if (contextless > 0) {
    report.warnings.push_back(std::to_string(contextless) +
                              " item(s) had no context and no retrieval index; scored with an empty context");
  }
  return report;
}

inline EvalReport evaluate(const Scorer& scorer, const std::vector<QAItem>& items, const AnswerOptions& options = {},
                           std::uint64_t seed = 0) {
  return report_from_answers(items, answer_all(scorer, items, options), Components{}, seed);
}

inline const std::vector<std::string>& default_ablations() {
  static const std::vector<std::string> keys = {"A", "Q", "C", "A*Q*C"};
  return keys;
}

// One report per component configuration, all computed from a single
// scoring pass.
inline std::map<std::string, EvalReport> ablate(const Scorer& scorer, const std::vector<QAItem>& items,
                                                const std::vector<std::string>& configurations = default_ablations(),
                                                const AnswerOptions& options = {}, std::uint64_t seed = 0) {
  if (configurations.empty()) fail(ErrorKind::kValidation, "ablate: no component configurations");
  std::vector<Components> parsed;
  for (const auto& key : configurations) {
    parsed.push_back(Components::parse(key));
    if (parsed.back().empty()) fail(ErrorKind::kValidation, "ablate: empty component set");
  }
  const std::vector<Answer> answers = answer_all(scorer, items, options);
  std::map<std::string, EvalReport> out;
  for (std::size_t c = 0; c < configurations.size(); ++c) {
    out[configurations[c]] = report_from_answers(items, answers, parsed[c], seed);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::ordered_json to_json(const OptionScore& o) {
  nlohmann::ordered_json j;
  j["d_h"] = o.d_h;
  j["d_r"] = o.d_r;
  j["d_t"] = o.d_t;
  j["product"] = o.product;
  return j;
}

inline nlohmann::ordered_json prediction_json(std::size_t item_number, const ItemResult& r) {
  nlohmann::ordered_json j;
  j["item"] = item_number;
  j["chosen"] = r.chosen;
  j["scores"] = nlohmann::ordered_json::array();
  for (const auto& o : r.scores) j["scores"].push_back(to_json(o));
  return j;
}

// Predictions JSONL; "item" is the 1-based position of the item in its file.
inline void write_predictions(std::ostream& out, const EvalReport& report) {
  for (std::size_t i = 0; i < report.items.size(); ++i) out << prediction_json(i + 1, report.items[i]).dump() << '\n';
}

inline nlohmann::ordered_json to_json(const EvalReport& r, bool include_items = true) {
  nlohmann::ordered_json j;
  j["accuracy"] = r.accuracy;
  j["labeled"] = r.labeled;
  j["correct"] = r.correct;
  j["items_total"] = r.items.size();
  j["seed"] = r.seed;
  j["tie_break"] = r.tie_break;
  nlohmann::ordered_json hist = nlohmann::ordered_json::object();
  for (const auto& [n, count] : r.option_counts) hist[std::to_string(n)] = count;
  j["option_count_histogram"] = hist;
  nlohmann::ordered_json topk = nlohmann::ordered_json::object();
  for (std::size_t k = 0; k < r.top_k_accuracy.size(); ++k) topk[std::to_string(k + 1)] = r.top_k_accuracy[k];
  j["top_k_accuracy"] = topk;
  j["warnings"] = r.warnings;
  if (include_items) {
    j["items"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < r.items.size(); ++i) {
      auto p = prediction_json(i + 1, r.items[i]);
      if (r.items[i].label) p["label"] = *r.items[i].label;
      j["items"].push_back(std::move(p));
    }
  }
  return j;
}

}  // namespace ktl::qa
