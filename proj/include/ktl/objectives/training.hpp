#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "ktl/core/fact_set.hpp"
#include "ktl/nn/trainer.hpp"
#include "ktl/objectives/model.hpp"

namespace ktl::objectives {

inline text::Vocabulary build_vocabulary(const std::vector<Triple>& triples,
                                         std::size_t min_count = text::kDefaultMinCount) {
  std::vector<text::Tokens> seqs;
  seqs.reserve(3 * triples.size());
  for (const auto& t : triples) {
    for (auto d : kAllDirections) seqs.push_back(t.field(d).tokens());
  }
  return text::Vocabulary::build(seqs, min_count);
}

inline Direction sample_direction(Rng& rng) { return kAllDirections[uniform_index(rng, 3)]; }

// Loss of one KRL example in a sampled direction. NCE negatives are fresh
// corruptions of the generated field, encoded and projected like the
// target.
inline Var krl_example_loss(Tape& tape, const KtlModel& model, const FactSet& facts, const Triple& triple,
                            Direction direction, std::size_t negatives, std::uint64_t negative_seed) {
  const KrlOutput out = krl_forward(tape, model.encoder, model.vocab, model.krl, direction, triple);
  if (model.method == Method::kKrlL2) return l2_loss(out.generated, out.target);
  const auto& heads = model.krl[direction];
  std::vector<Var> projected;
  for (const Phrase& p : sample_negatives(facts, triple, direction, negatives, negative_seed)) {
    projected.push_back(heads.output(encode_phrase(tape, model.encoder, model.vocab, p, field_name(direction))));
  }
  return nce_loss(out.generated, out.target, projected, sim_kind_of(model.method));
}

using EpochCallback = std::function<void(std::size_t epoch, double loss)>;

inline nn::TrainHistory train_krl(KtlModel& model, const FactSet& facts, const nn::TrainConfig& config,
                                  std::size_t negatives = 10, const EpochCallback& on_epoch = {}) {
  if (!model.is_krl()) fail(ErrorKind::kValidation, "train_krl: model is not a KRL model");
  if (model.method != Method::kKrlL2 && negatives == 0) fail(ErrorKind::kConfig, "train_krl: k must be >= 1");
  const auto& triples = facts.triples();
  auto loss = [&](Tape& tape, std::size_t i, Rng& rng) -> std::optional<Var> {
    const Direction d = sample_direction(rng);
    const std::uint64_t negative_seed = rng();
    try {
      return krl_example_loss(tape, model, facts, triples[i], d, negatives, negative_seed);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kLength) return std::nullopt;
      throw;
    }
  };
  return nn::train(model, triples.size(), loss, config, on_epoch);
}

inline nn::TrainHistory train_smlm(KtlModel& model, const std::vector<Triple>& triples, const nn::TrainConfig& config,
                                   const EpochCallback& on_epoch = {}) {
  if (model.is_krl()) fail(ErrorKind::kValidation, "train_smlm: model is not an SMLM model");
  const std::size_t max_length = model.encoder.config.max_length;
  auto loss = [&](Tape& tape, std::size_t i, Rng& rng) -> std::optional<Var> {
    const Direction d = sample_direction(rng);
    if (layout_length(triples[i]) > max_length) return std::nullopt;
    return smlm_forward_loss(tape, model.encoder, model.smlm, smlm_mask(model.vocab, triples[i], d, max_length));
  };
  return nn::train(model, triples.size(), loss, config, on_epoch);
}

inline nn::TrainHistory train_model(KtlModel& model, const FactSet& facts, const nn::TrainConfig& config,
                                    std::size_t negatives = 10, const EpochCallback& on_epoch = {}) {
  return model.is_krl() ? train_krl(model, facts, config, negatives, on_epoch)
                        : train_smlm(model, facts.triples(), config, on_epoch);
}

}  // namespace ktl::objectives
