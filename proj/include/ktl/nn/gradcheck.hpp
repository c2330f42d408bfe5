#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ktl/nn/tape.hpp"
#include "ktl/nn/trainer.hpp"

namespace ktl::nn {

struct TensorCheck {
  std::string name;
  double relative_error = 0.0;
  double analytic_norm = 0.0;
};

struct GradcheckReport {
  std::vector<TensorCheck> tensors;
  double max_relative_error = 0.0;
  std::string worst;
};

struct GradcheckOptions {
  double step = 1e-5;
  // Denominator floor so tensors whose true gradient is numerically zero
  // are judged on absolute error instead of on rounding noise.
  double norm_floor = 1e-6;
  // Test hook: added to every analytic gradient entry.
  double corrupt = 0.0;
};

// Compares the tape's gradient of loss_fn(tape) against central finite
// differences, tensor by tensor: |a - n| / max(|a|, |n|, floor).
template <class Model, class LossFn>
GradcheckReport gradcheck(Model& model, LossFn&& loss_fn, const GradcheckOptions& options = {}) {
  std::vector<std::string> names;
  std::vector<Param*> params;
  model.visit_params([&](const std::string& name, Param& p) {
    names.push_back(name);
    params.push_back(&p);
  });
  for (Param* p : params) p->zero_grad();
  {
    Tape tape;
    tape.backward(loss_fn(tape));
  }
  auto evaluate = [&] {
    Tape tape(false);
    return loss_fn(tape).scalar();
  };

  GradcheckReport report;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Param& p = *params[k];
    double diff = 0.0, analytic = 0.0, numeric = 0.0;
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double saved = p.value[i];
      p.value[i] = saved + options.step;
      const double up = evaluate();
      p.value[i] = saved - options.step;
      const double down = evaluate();
      p.value[i] = saved;
      const double n = (up - down) / (2.0 * options.step);
      const double a = p.grad[i] + options.corrupt;
      diff += (a - n) * (a - n);
      analytic += a * a;
      numeric += n * n;
    }
    TensorCheck check;
    check.name = names[k];
    check.analytic_norm = std::sqrt(analytic);
    check.relative_error =
        std::sqrt(diff) / std::max({std::sqrt(analytic), std::sqrt(numeric), options.norm_floor});
    if (check.relative_error >= report.max_relative_error) {
      report.max_relative_error = check.relative_error;
      report.worst = check.name;
    }
    report.tensors.push_back(std::move(check));
  }
  for (Param* p : params) p->zero_grad();
  return report;
}

}  // namespace ktl::nn
