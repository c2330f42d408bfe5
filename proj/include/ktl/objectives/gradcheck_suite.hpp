#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ktl/nn/gradcheck.hpp"
#include "ktl/objectives/training.hpp"

namespace ktl::objectives {

struct GradcheckInstance {
  Method method = Method::kSmlm;
  std::uint64_t seed = 0;
  std::size_t dim = 8;
  std::size_t layers = 1;
  std::size_t negatives = 3;
};

inline const std::vector<Triple>& gradcheck_triples() {
  static const std::vector<Triple> triples = {
      {"warm air", "rises above", "cold water"},   {"the river", "flows into", "a lake"},
      {"green plants", "need", "sunlight"},         {"a magnet", "attracts", "iron nails"},
      {"ice", "melts into", "liquid water"},       {"the moon", "orbits", "the earth"},
      {"wind", "moves", "sand dunes"},             {"heavy rain", "causes", "floods"},
  };
  return triples;
}

// One small random instance of a variant: a fresh model, one training
// triple, one sampled direction (and negatives for NCE).
inline nn::GradcheckReport gradcheck_instance(const GradcheckInstance& inst, double corrupt = 0.0) {
  const auto& triples = gradcheck_triples();
  FactSet facts;
  for (const auto& t : triples) facts.insert(t);
  nn::EncoderConfig config;
  config.dim = inst.dim;
  config.layers = inst.layers;
  config.heads = 2;
  config.ff_dim = 2 * inst.dim;
  config.max_length = 16;
  config.init_std = 0.3;
  KtlModel model = KtlModel::init(inst.method, build_vocabulary(triples, 1), config, inst.seed);

  Rng rng(derive_seed(inst.seed, 0x6C4EC));
  const Triple& triple = triples[uniform_index(rng, triples.size())];
  const Direction direction = sample_direction(rng);
  const std::uint64_t negative_seed = rng();
  nn::GradcheckOptions options;
  options.corrupt = corrupt;
  auto loss = [&](Tape& tape) {
    if (!model.is_krl()) {
      const auto input = smlm_mask(model.vocab, triple, direction, config.max_length);
      return smlm_forward_loss(tape, model.encoder, model.smlm, input);
    }
    return krl_example_loss(tape, model, facts, triple, direction, inst.negatives, negative_seed);
  };
  return nn::gradcheck(model, loss, options);
}

}  // namespace ktl::objectives
