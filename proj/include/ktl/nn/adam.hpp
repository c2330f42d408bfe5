#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <nlohmann/json.hpp>
#include <vector>

#include "ktl/nn/matrix.hpp"
#include "ktl/util/error.hpp"

namespace ktl::nn {

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;
  double warmup_fraction = 0.1;
  double clip_norm = 1.0;  // <= 0 disables clipping

  void validate() const {
    if (!(learning_rate > 0.0)) fail(ErrorKind::kConfig, "optimizer: learning_rate must be positive");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) fail(ErrorKind::kConfig, "optimizer: betas must be in [0, 1)");
    if (!(epsilon > 0.0)) fail(ErrorKind::kConfig, "optimizer: epsilon must be positive");
    if (weight_decay < 0.0) fail(ErrorKind::kConfig, "optimizer: weight_decay must be >= 0");
    if (warmup_fraction < 0.0 || warmup_fraction > 0.1) fail(ErrorKind::kConfig, "optimizer: warmup_fraction must be in [0, 0.1]");
  }
};

// Linear warmup to the peak rate over the first warmup steps, then linear
// decay towards zero at total_steps.
class LinearSchedule {
 public:
  LinearSchedule(double peak, std::size_t total_steps, double warmup_fraction)
      : peak_(peak),
        total_(std::max<std::size_t>(total_steps, 1)),
        warmup_(static_cast<std::size_t>(std::floor(warmup_fraction * static_cast<double>(total_steps)))) {}

  double rate(std::size_t step) const noexcept {
    if (step < warmup_) return peak_ * static_cast<double>(step + 1) / static_cast<double>(warmup_);
    const double remaining = static_cast<double>(total_ - std::min(step, total_));
    return peak_ * remaining / static_cast<double>(total_ - warmup_);
  }

 private:
  double peak_;
  std::size_t total_;
  std::size_t warmup_;
};

class Adam {
 public:
  Adam(std::vector<Param*> params, AdamConfig config) : params_(std::move(params)), config_(config) {
    config_.validate();
    for (const Param* p : params_) {
      first_.emplace_back(p->value.rows(), p->value.cols());
      second_.emplace_back(p->value.rows(), p->value.cols());
    }
  }

  // Global gradient norm before clipping.
  double gradient_norm() const {
    double s = 0.0;
    for (const Param* p : params_) s += p->grad.squared_norm();
    return std::sqrt(s);
  }

  void step(double learning_rate) {
    ++steps_;
    double clip = 1.0;
    if (config_.clip_norm > 0.0) {
      const double g = gradient_norm();
      if (g > config_.clip_norm) clip = config_.clip_norm / g;
    }
    const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(steps_));
    const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(steps_));
    for (std::size_t k = 0; k < params_.size(); ++k) {
      Param& p = *params_[k];
      Matrix& m = first_[k];
      Matrix& v = second_[k];
      for (std::size_t i = 0; i < p.value.size(); ++i) {
        const double g = p.grad[i] * clip;
        m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g;
        v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g * g;
        const double update = (m[i] / c1) / (std::sqrt(v[i] / c2) + config_.epsilon);
        p.value[i] -= learning_rate * (update + config_.weight_decay * p.value[i]);
      }
    }
  }

  std::size_t steps() const noexcept { return steps_; }

 private:
  std::vector<Param*> params_;
  AdamConfig config_;
  std::vector<Matrix> first_;
  std::vector<Matrix> second_;
  std::size_t steps_ = 0;
};

inline nlohmann::ordered_json to_json(const AdamConfig& c) {
  nlohmann::ordered_json j;
  j["learning_rate"] = c.learning_rate;
  j["beta1"] = c.beta1;
  j["beta2"] = c.beta2;
  j["epsilon"] = c.epsilon;
  j["weight_decay"] = c.weight_decay;
  j["warmup_fraction"] = c.warmup_fraction;
  j["clip_norm"] = c.clip_norm;
  return j;
}

}  // namespace ktl::nn
