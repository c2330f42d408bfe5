#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "ktl/nn/encoder.hpp"
#include "ktl/nn/trainer.hpp"
#include "ktl/qa/evaluate.hpp"
#include "ktl/qa/qa_item.hpp"
#include "ktl/text/vocabulary.hpp"

namespace ktl::qa {

struct FewShotConfig {
  double fraction = 0.08;
  std::size_t splits = 3;
  std::size_t hidden = 64;
  std::size_t epochs = 20;
  std::size_t batch_size = 4;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(fraction > 0.0 && fraction <= 1.0)) fail(ErrorKind::kValidation, "few-shot fraction must be in (0, 1]");
    if (splits == 0) fail(ErrorKind::kConfig, "few-shot splits must be >= 1");
    if (hidden == 0) fail(ErrorKind::kConfig, "few-shot hidden size must be >= 1");
  }
};

inline nlohmann::ordered_json to_json(const FewShotConfig& c) {
  nlohmann::ordered_json j;
  j["fraction"] = c.fraction;
  j["splits"] = c.splits;
  j["hidden"] = c.hidden;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["learning_rate"] = c.learning_rate;
  return j;
}

// [cls] context [sep] question [sep] option [sep]
inline text::TokenIds option_input(const text::Vocabulary& vocab, const QAItem& item, std::size_t option,
                                   std::size_t max_length) {
  text::TokenIds ids{text::kClsId};
  for (const std::string* part : {item.context ? &*item.context : nullptr, &item.question, &item.options[option]}) {
    if (part != nullptr) {
      for (auto id : vocab.encode_text(*part)) ids.push_back(id);
    }
    ids.push_back(text::kSepId);
  }
  if (ids.size() > max_length) {
    fail(ErrorKind::kLength, "few-shot input of " + std::to_string(ids.size()) + " positions exceeds max_length");
  }
  return ids;
}

// An encoder with a shared feedforward scorer over each option's [cls]
// output; options compete through a softmax.
struct OptionClassifier {
  text::Vocabulary vocab;
  nn::EncoderParams encoder;
  nn::FeedForward scorer;  // dim -> hidden -> 1

  static OptionClassifier make(const text::Vocabulary& vocab, const nn::EncoderParams& encoder, std::size_t hidden,
                               std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0xF3517));
    return {vocab, encoder, nn::FeedForward::make(encoder.config.dim, hidden, 1, encoder.config.init_std, rng)};
  }

  template <class F>
  void visit_params(F&& f) {
    encoder.visit_params(f);
    nn::FeedForward::visit(scorer, "scorer", f);
  }

  nn::Var logits(nn::Tape& tape, const QAItem& item) const {
    std::vector<nn::Var> per_option;
    for (std::size_t o = 0; o < item.options.size(); ++o) {
      const auto ids = option_input(vocab, item, o, encoder.config.max_length);
      per_option.push_back(scorer(nn::encode(tape, encoder, ids).pooled));
    }
    return nn::concat_cols(per_option);
  }

  // Distances 1 - p(option), so the usual argmin picks the most probable option.
  std::vector<OptionScore> option_scores(const QAItem& item) const {
    nn::Tape tape(false);
    const nn::Matrix z = logits(tape, item).value();
    const double lse = nn::log_sum_exp(z.values());
    std::vector<OptionScore> out;
    for (std::size_t o = 0; o < z.cols(); ++o) {
      FieldDistances d;
      d.d_t = 1.0 - std::exp(z[o] - lse);
      out.push_back(OptionScore::from_contexts({d}));
    }
    return out;
  }
};

struct FewShotSplit {
  std::vector<std::size_t> train_indices;
  nn::TrainHistory history;
  EvalReport dev;
};

struct FewShotResult {
  std::vector<FewShotSplit> splits;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // population deviation over splits
};

// Seeded sample of floor(fraction * n) item indices.
inline std::vector<std::size_t> sample_split(std::size_t n, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) fail(ErrorKind::kValidation, "few-shot fraction must be in (0, 1]");
  const auto take = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  if (take == 0) fail(ErrorKind::kValidation, "few-shot fraction selects no training items");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (std::size_t i = 0; i < take; ++i) std::swap(idx[i], idx[i + uniform_index(rng, n - i)]);
  idx.resize(take);
  return idx;
}

inline EvalReport evaluate_classifier(const OptionClassifier& clf, const std::vector<QAItem>& items,
                                      std::uint64_t seed) {
  std::vector<ItemResult> results(items.size());
  parallel_for(items.size(), [&](std::size_t i) {
    results[i].label = items[i].label;
    results[i].scores = clf.option_scores(items[i]);
  });
  return summarize(std::move(results), Components{}, seed);
}

// Fine-tunes a copy of `encoder` with a fresh scorer on each seeded split
// and reports dev accuracy per split plus mean and deviation.
inline FewShotResult few_shot_finetune(const nn::EncoderParams& encoder, const text::Vocabulary& vocab,
                                       const std::vector<QAItem>& train_items, const std::vector<QAItem>& dev_items,
                                       const FewShotConfig& config) {
  config.validate();
  std::vector<QAItem> labeled;
  for (const auto& it : train_items) {
    if (it.label) labeled.push_back(it);
  }
  if (labeled.empty()) fail(ErrorKind::kValidation, "few-shot training needs labeled items");

  FewShotResult result;
  for (std::size_t s = 0; s < config.splits; ++s) {
    const std::uint64_t split_seed = derive_seed(config.seed, 0x5B1700 + s);
    FewShotSplit split;
    split.train_indices = sample_split(labeled.size(), config.fraction, split_seed);
    OptionClassifier clf = OptionClassifier::make(vocab, encoder, config.hidden, split_seed);
    nn::TrainConfig tc;
    tc.epochs = config.epochs;
    tc.batch_size = config.batch_size;
    tc.adam.learning_rate = config.learning_rate;
    tc.seed = split_seed;
    auto loss = [&](nn::Tape& tape, std::size_t i, Rng&) -> std::optional<nn::Var> {
      const QAItem& item = labeled[split.train_indices[i]];
      return nn::scale(nn::log_softmax_pick(clf.logits(tape, item), *item.label), -1.0);
    };
    split.history = nn::train(clf, split.train_indices.size(), loss, tc);
    split.dev = evaluate_classifier(clf, dev_items, split_seed);
    result.splits.push_back(std::move(split));
  }
  double sum = 0.0;
  for (const auto& s : result.splits) sum += s.dev.accuracy;
  result.mean_accuracy = sum / static_cast<double>(result.splits.size());
  double var = 0.0;
  for (const auto& s : result.splits) var += (s.dev.accuracy - result.mean_accuracy) * (s.dev.accuracy - result.mean_accuracy);
  result.std_accuracy = std::sqrt(var / static_cast<double>(result.splits.size()));
  return result;
}

}  // namespace ktl::qa
