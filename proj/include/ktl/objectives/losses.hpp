#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ktl/nn/tape.hpp"
#include "ktl/util/error.hpp"

namespace ktl::objectives {

using nn::Matrix;
using nn::Tape;
using nn::Var;

enum class SimKind { kCosine, kNegL2 };

// How a trained model turns (generated, target) into a distance.
enum class DistanceSemantics { kL2, kNceL2, kNceCos, kSmlm };

inline std::string_view to_string(DistanceSemantics s) noexcept {
  switch (s) {
    case DistanceSemantics::kL2:
      return "l2";
    case DistanceSemantics::kNceL2:
      return "nce_l2";
    case DistanceSemantics::kNceCos:
      return "nce_cos";
    case DistanceSemantics::kSmlm:
      return "smlm";
  }
  return "?";
}

inline DistanceSemantics distance_semantics_from_string(std::string_view s) {
  if (s == "l2") return DistanceSemantics::kL2;
  if (s == "nce_l2") return DistanceSemantics::kNceL2;
  if (s == "nce_cos") return DistanceSemantics::kNceCos;
  if (s == "smlm") return DistanceSemantics::kSmlm;
  fail(ErrorKind::kSchema, "unknown distance_semantics '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Plain double versions, used for scoring and as test oracles.

inline double l2_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorKind::kValidation, "l2_distance: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Cosine similarity; 0 when either vector is zero.
inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorKind::kValidation, "cosine_similarity: dimension mismatch");
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return std::clamp(ab / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

inline double similarity(SimKind kind, std::span<const double> a, std::span<const double> b) {
  return kind == SimKind::kCosine ? cosine_similarity(a, b) : -l2_distance(a, b);
}

// -ln softmax(sims)[0], where sims[0] is the positive.
inline double nce_loss_value(std::span<const double> sims) {
  if (sims.size() < 2) fail(ErrorKind::kValidation, "nce_loss: need at least one negative");
  return nn::log_sum_exp(sims) - sims[0];
}

inline double nce_loss_value(std::span<const double> generated, std::span<const double> positive,
                             const std::vector<std::vector<double>>& negatives, SimKind kind) {
  std::vector<double> sims{similarity(kind, generated, positive)};
  for (const auto& n : negatives) sims.push_back(similarity(kind, generated, n));
  return nce_loss_value(sims);
}

inline double vector_distance(DistanceSemantics semantics, std::span<const double> generated,
                              std::span<const double> target) {
  switch (semantics) {
    case DistanceSemantics::kL2:
      return l2_distance(generated, target);
    case DistanceSemantics::kNceL2:
      return 1.0 + l2_distance(generated, target);
    case DistanceSemantics::kNceCos:
      return 1.0 - cosine_similarity(generated, target);
    case DistanceSemantics::kSmlm:
      break;
  }
  fail(ErrorKind::kValidation, "vector_distance: not a vector-distance model");
}

// Mean over rows of -log2 softmax(row)[target].
inline double smlm_loss_value(const Matrix& logits, const std::vector<std::size_t>& targets) {
  if (logits.rows() != targets.size() || targets.empty()) fail(ErrorKind::kValidation, "smlm_loss: bad targets");
  double total = 0.0;
  for (std::size_t i = 0; i < logits.rows(); ++i) total += nn::log_sum_exp(logits.row(i)) - logits(i, targets[i]);
  return total / static_cast<double>(targets.size()) / std::numbers::ln2;
}

// ---------------------------------------------------------------------------
// Differentiable versions.

inline Var l2_loss(Var generated, Var target) { return nn::norm(nn::sub(generated, target)); }

inline Var cosine_similarity(Var a, Var b) {
  Var denominator = nn::mul(nn::norm(a), nn::norm(b));
  if (denominator.scalar() == 0.0) denominator = nn::add_constant(denominator, 1.0);
  return nn::div(nn::dot(a, b), denominator);
}

inline Var similarity(SimKind kind, Var a, Var b) {
  return kind == SimKind::kCosine ? cosine_similarity(a, b) : nn::scale(nn::norm(nn::sub(a, b)), -1.0);
}

inline Var nce_loss(Var generated, Var positive, const std::vector<Var>& negatives, SimKind kind) {
  if (negatives.empty()) fail(ErrorKind::kValidation, "nce_loss: need at least one negative");
  std::vector<Var> sims{similarity(kind, generated, positive)};
  for (const Var& n : negatives) sims.push_back(similarity(kind, generated, n));
  return nn::scale(nn::log_softmax_pick(nn::concat_cols(sims), 0), -1.0);
}

// Mean masked-token cross-entropy in bits.
inline Var smlm_loss(Var logits, const std::vector<std::size_t>& targets) {
  return nn::scale(nn::cross_entropy_rows(logits, targets), 1.0 / std::numbers::ln2);
}

}  // namespace ktl::objectives
