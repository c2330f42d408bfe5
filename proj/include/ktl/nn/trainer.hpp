#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ktl/nn/adam.hpp"
#include "ktl/nn/tape.hpp"
#include "ktl/util/error.hpp"
#include "ktl/util/rng.hpp"

namespace ktl::nn {

struct TrainConfig {
  std::size_t epochs = 3;
  std::size_t batch_size = 8;
  AdamConfig adam;
  std::uint64_t seed = 0;
};

struct TrainHistory {
  std::vector<double> epoch_loss;  // mean loss over the examples of each epoch
  std::size_t steps = 0;
  std::size_t skipped = 0;  // examples the loss function declined (e.g. over-length)
};

// Collects pointers to every parameter a model exposes through visit_params.
template <class Model>
std::vector<Param*> parameter_list(Model& model) {
  std::vector<Param*> out;
  model.visit_params([&](const std::string&, Param& p) { out.push_back(&p); });
  return out;
}

template <class Model>
void zero_grads(Model& model) {
  model.visit_params([](const std::string&, Param& p) { p.zero_grad(); });
}

// Minibatch Adam over `count` examples. loss_fn(tape, index, rng) returns
// the example's scalar loss on the tape, or nullopt to skip it. Gradients
// of a batch are averaged before the step. Example order is a seeded
// shuffle per epoch, so the history is a pure function of the inputs.
template <class Model, class LossFn>
TrainHistory train(Model& model, std::size_t count, LossFn&& loss_fn, const TrainConfig& config,
                   const std::function<void(std::size_t epoch, double loss)>& on_epoch = {}) {
  if (count == 0) fail(ErrorKind::kValidation, "train: empty dataset");
  if (config.batch_size == 0) fail(ErrorKind::kConfig, "train: batch_size must be positive");
  TrainHistory history;
  if (config.epochs == 0) return history;

  std::vector<Param*> params = parameter_list(model);
  Adam adam(params, config.adam);
  const std::size_t batches = (count + config.batch_size - 1) / config.batch_size;
  LinearSchedule schedule(config.adam.learning_rate, batches * config.epochs, config.adam.warmup_fraction);

  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng(derive_seed(config.seed, 0x5A0FF1E));
  Rng example_rng(derive_seed(config.seed, 0xE8A3B1E));
  double last_finite = std::numeric_limits<double>::quiet_NaN();

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = count; i > 1; --i) std::swap(order[i - 1], order[uniform_index(shuffle_rng, i)]);
    double total = 0.0;
    std::size_t seen = 0;
    for (std::size_t b = 0; b < batches; ++b) {
      for (Param* p : params) p->zero_grad();
      const std::size_t begin = b * config.batch_size;
      const std::size_t end = std::min(count, begin + config.batch_size);
      std::size_t used = 0;
      for (std::size_t i = begin; i < end; ++i) {
        Tape tape;
        std::optional<Var> loss = loss_fn(tape, order[i], example_rng);
        if (!loss) {
          if (epoch == 0) ++history.skipped;
          continue;
        }
        const double value = loss->scalar();
        if (!std::isfinite(value)) {
          std::ostringstream msg;
          msg << "training diverged at epoch " << epoch + 1 << ", step " << history.steps + 1
              << "; last finite loss " << last_finite;
          fail(ErrorKind::kDivergence, msg.str());
        }
        last_finite = value;
        tape.backward(scale(*loss, 1.0 / static_cast<double>(end - begin)));
        total += value;
        ++seen;
        ++used;
      }
      if (used == 0) continue;
      if (!std::isfinite(adam.gradient_norm())) {
        std::ostringstream msg;
        msg << "non-finite gradient at epoch " << epoch + 1 << "; last finite loss " << last_finite;
        fail(ErrorKind::kDivergence, msg.str());
      }
      adam.step(schedule.rate(history.steps));
      ++history.steps;
    }
    const double mean = seen ? total / static_cast<double>(seen) : 0.0;
    history.epoch_loss.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean);
  }
  return history;
}

}  // namespace ktl::nn
