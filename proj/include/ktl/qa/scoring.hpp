#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ktl/core/triple.hpp"
#include "ktl/objectives/model.hpp"
#include "ktl/qa/qa_item.hpp"
#include "ktl/retrieval/bm25.hpp"
#include "ktl/text/hypothesis.hpp"
#include "ktl/util/rng.hpp"

namespace ktl::qa {

using objectives::FieldDistances;

// Identifies one scored (item, option, context) cell.
struct ScoreKey {
  std::size_t item = 0;
  std::size_t option = 0;
  std::size_t context = 0;
};

class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual FieldDistances score(const ScoreKey& key, const Triple& triple) const = 0;
};

class ModelScorer final : public Scorer {
 public:
  explicit ModelScorer(const objectives::KtlModel& model) : model_(model) {}
  FieldDistances score(const ScoreKey&, const Triple& triple) const override { return model_.distances(triple); }

 private:
  const objectives::KtlModel& model_;
};

// Independent uniform distances per cell, derived statelessly from the
// seed so results do not depend on evaluation order.
class RandomScorer final : public Scorer {
 public:
  explicit RandomScorer(std::uint64_t seed) : seed_(seed) {}
  FieldDistances score(const ScoreKey& key, const Triple&) const override {
    std::uint64_t h = derive_seed(seed_, key.item);
    h = mix64(h ^ mix64(key.option + 1));
    h = mix64(h ^ mix64(key.context + 0x100));
    FieldDistances d;
    d.d_h = unit_from_bits(mix64(h ^ 1));
    d.d_r = unit_from_bits(mix64(h ^ 2));
    d.d_t = unit_from_bits(mix64(h ^ 3));
    return d;
  }

 private:
  std::uint64_t seed_;
};

// Which distances enter a product: A -> d_t, Q -> d_r, C -> d_h.
struct Components {
  bool answer = true;
  bool question = true;
  bool context = true;

  static Components parse(const std::string& key) {
    Components c{false, false, false};
    std::size_t pos = 0;
    while (pos <= key.size()) {
      std::size_t end = key.find('*', pos);
      if (end == std::string::npos) end = key.size();
      const std::string part = key.substr(pos, end - pos);
      if (part == "A") {
        c.answer = true;
      } else if (part == "Q") {
        c.question = true;
      } else if (part == "C") {
        c.context = true;
      } else {
        fail(ErrorKind::kValidation, "unknown ablation component '" + part + "' in '" + key + "' (use A, Q, C)");
      }
      pos = end + 1;
    }
    return c;
  }

  bool empty() const noexcept { return !answer && !question && !context; }
};

// Product of the selected distances, always multiplied in the order
// d_t, d_h, d_r so the full product is bit-identical everywhere.
inline double partial_product(const FieldDistances& d, Components c) {
  double p = 1.0;
  if (c.answer) p *= d.d_t;
  if (c.context) p *= d.d_h;
  if (c.question) p *= d.d_r;
  return p;
}

inline double full_product(const FieldDistances& d) { return partial_product(d, Components{}); }

struct OptionScore {
  double d_h = 0.0;
  double d_r = 0.0;
  double d_t = 0.0;
  double product = 0.0;
  std::vector<FieldDistances> per_context;  // one entry per scored context

  // Mean over contexts of the selected partial product.
  double score(Components c) const {
    double s = 0.0;
    for (const auto& d : per_context) s += partial_product(d, c);
    return s / static_cast<double>(per_context.size());
  }

  static OptionScore from_contexts(std::vector<FieldDistances> contexts) {
    OptionScore o;
    const double n = static_cast<double>(contexts.size());
    for (const auto& d : contexts) {
      o.d_h += d.d_h / n;
      o.d_r += d.d_r / n;
      o.d_t += d.d_t / n;
    }
    o.per_context = std::move(contexts);
    o.product = o.score(Components{});
    return o;
  }
};

struct AnswerOptions {
  bool hypothesis = false;
  std::size_t top_k = 5;
  const retrieval::InvertedIndex* index = nullptr;
  const text::WhRuleTable* rules = nullptr;
};

struct Answer {
  std::size_t chosen = 0;
  std::vector<OptionScore> scores;
  std::optional<std::string> warning;
};

// Lowest score wins; ties go to the lowest index.
inline std::size_t argmin(const std::vector<double>& scores) {
  if (scores.empty()) fail(ErrorKind::kValidation, "argmin over no options");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] < scores[best]) best = i;
  }
  return best;
}

inline std::size_t choose(const std::vector<OptionScore>& scores, Components c = {}) {
  std::vector<double> s;
  s.reserve(scores.size());
  for (const auto& o : scores) s.push_back(o.score(c));
  return argmin(s);
}

// Contexts an option is scored against: the item's own context, else the
// top-k retrieved sentences for question + option, else the empty string.
inline std::vector<std::string> option_contexts(const QAItem& item, const std::string& option,
                                                const AnswerOptions& options) {
  if (item.context) return {*item.context};
  if (options.index == nullptr) return {std::string()};
  std::vector<std::string> out;
  for (const auto& hit : options.index->retrieve(item.question + " " + option, options.top_k)) {
    out.push_back(options.index->document(hit.doc));
  }
  if (out.empty()) out.emplace_back();
  return out;
}

inline Answer answer(const Scorer& scorer, const QAItem& item, std::size_t item_index,
                     const AnswerOptions& options = {}) {
  item.validate();
  Answer result;
  if (!item.context && options.index == nullptr) {
    result.warning = "item " + std::to_string(item_index + 1) + ": no context and no retrieval index; scored with an empty context";
  }
  const text::WhRuleTable& rules = options.rules ? *options.rules : text::WhRuleTable::bundled();
  for (std::size_t o = 0; o < item.options.size(); ++o) {
    const std::string& option = item.options[o];
    if (text::normalize(option).empty()) fail(ErrorKind::kValidation, "item " + std::to_string(item_index + 1) + ": empty option");
    const Phrase relation(options.hypothesis ? text::question_to_hypothesis(item.question, option, rules) : item.question);
    const Phrase tail(option);
    const auto contexts = option_contexts(item, option, options);
    std::vector<FieldDistances> cells;
    cells.reserve(contexts.size());
    for (std::size_t c = 0; c < contexts.size(); ++c) {
      cells.push_back(scorer.score({item_index, o, c}, Triple(Phrase(contexts[c]), relation, tail)));
    }
    result.scores.push_back(OptionScore::from_contexts(std::move(cells)));
  }
  result.chosen = choose(result.scores);
  return result;
}

}  // namespace ktl::qa
