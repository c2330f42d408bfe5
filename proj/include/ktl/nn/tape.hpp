#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <limits>
#include <unordered_map>
#include <vector>

#include "ktl/nn/matrix.hpp"
#include "ktl/util/error.hpp"
#include "ktl/util/rng.hpp"

namespace ktl::nn {

class Tape;

// Handle to a node on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape& tape() const noexcept { return *tape_; }
  std::size_t id() const noexcept { return id_; }
  bool valid() const noexcept { return tape_ != nullptr; }

  const Matrix& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  double scalar() const { return value()[0]; }

 private:
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Reverse-mode autodiff record. Nodes are appended in evaluation order,
// which is already a topological order, so backward is a reverse sweep.
// A non-recording tape computes values only.
class Tape {
 public:
  using Backward = std::function<void(Tape&, std::size_t)>;

  explicit Tape(bool record = true) : record_(record) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const noexcept { return record_; }

  Var constant(Matrix m) {
    nodes_.push_back(Node{std::move(m), {}, {}, nullptr, false});
    return {this, nodes_.size() - 1};
  }

  // Leaf bound to a parameter; reused if the parameter appears twice.
  Var param(const Param& p) {
    if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return {this, it->second};
    nodes_.push_back(Node{p.value, {}, {}, record_ ? &p : nullptr, record_});
    param_nodes_.emplace(&p, nodes_.size() - 1);
    return {this, nodes_.size() - 1};
  }

  const Matrix& value(std::size_t id) const noexcept { return nodes_[id].value; }
  bool requires_grad(std::size_t id) const noexcept { return nodes_[id].requires_grad; }

  // Gradient buffer of a node, zero-initialized on first use.
  Matrix& grad(std::size_t id) {
    Node& n = nodes_[id];
    if (n.grad.empty() && !n.value.empty()) n.grad = Matrix(n.value.rows(), n.value.cols());
    return n.grad;
  }

  Var emit(Matrix value, std::initializer_list<Var> inputs, Backward backward) {
    return emit_any(std::move(value), inputs.begin(), inputs.end(), std::move(backward));
  }

  template <class It>
  Var emit_any(Matrix value, It first, It last, Backward backward) {
    bool needs = false;
    if (record_) {
      for (It it = first; it != last; ++it) needs = needs || nodes_[it->id()].requires_grad;
    }
    nodes_.push_back(Node{std::move(value), {}, needs ? std::move(backward) : Backward{}, nullptr, needs});
    return {this, nodes_.size() - 1};
  }

  // Seeds d(loss)/d(loss) = 1, sweeps backwards and adds every parameter
  // leaf's gradient into its Param::grad.
  void backward(Var loss) {
    if (!record_) fail(ErrorKind::kValidation, "backward on a non-recording tape");
    if (loss.value().size() != 1) fail(ErrorKind::kValidation, "backward needs a scalar loss");
    if (!nodes_[loss.id()].requires_grad) return;
    grad(loss.id())[0] = 1.0;
    for (std::size_t i = loss.id() + 1; i-- > 0;) {
      Node& n = nodes_[i];
      if (!n.requires_grad || n.grad.empty()) continue;
      if (n.backward) n.backward(*this, i);
      if (n.param != nullptr) {
        const Param& p = *n.param;
        if (!p.grad.same_shape(p.value)) p.zero_grad();
        for (std::size_t k = 0; k < n.grad.size(); ++k) p.grad[k] += n.grad[k];
      }
    }
  }

  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    Backward backward;
    const Param* param;
    bool requires_grad;
  };

  bool record_;
  std::vector<Node> nodes_;
  std::unordered_map<const Param*, std::size_t> param_nodes_;
};

inline const Matrix& Var::value() const { return tape_->value(id_); }

namespace detail {

inline void require_same_shape(const Var& a, const Var& b, const char* op) {
  if (!a.value().same_shape(b.value())) fail(ErrorKind::kValidation, std::string(op) + ": shape mismatch");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Linear algebra

inline Var matmul(Var a, Var b) {
  const Matrix& A = a.value();
  const Matrix& B = b.value();
  if (A.cols() != B.rows()) fail(ErrorKind::kValidation, "matmul: inner dimensions differ");
  const std::size_t n = A.rows(), k = A.cols(), m = B.cols();
  Matrix out(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double av = A(i, p);
      if (av == 0.0) continue;
      for (std::size_t j = 0; j < m; ++j) out(i, j) += av * B(p, j);
    }
  }
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().emit(std::move(out), {a, b}, [ia, ib, n, k, m](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    const Matrix& A = t.value(ia);
    const Matrix& B = t.value(ib);
    if (t.requires_grad(ia)) {
      Matrix& ga = t.grad(ia);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          double s = 0.0;
          for (std::size_t j = 0; j < m; ++j) s += g(i, j) * B(p, j);
          ga(i, p) += s;
        }
    }
    if (t.requires_grad(ib)) {
      Matrix& gb = t.grad(ib);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          const double av = A(i, p);
          if (av == 0.0) continue;
          for (std::size_t j = 0; j < m; ++j) gb(p, j) += av * g(i, j);
        }
    }
  });
}

// a * b^T
inline Var matmul_bt(Var a, Var b) {
  const Matrix& A = a.value();
  const Matrix& B = b.value();
  if (A.cols() != B.cols()) fail(ErrorKind::kValidation, "matmul_bt: inner dimensions differ");
  const std::size_t n = A.rows(), k = A.cols(), m = B.rows();
  Matrix out(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += A(i, p) * B(j, p);
      out(i, j) = s;
    }
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().emit(std::move(out), {a, b}, [ia, ib, n, k, m](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    const Matrix& A = t.value(ia);
    const Matrix& B = t.value(ib);
    if (t.requires_grad(ia)) {
      Matrix& ga = t.grad(ia);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          const double gv = g(i, j);
          for (std::size_t p = 0; p < k; ++p) ga(i, p) += gv * B(j, p);
        }
    }
    if (t.requires_grad(ib)) {
      Matrix& gb = t.grad(ib);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          const double gv = g(i, j);
          for (std::size_t p = 0; p < k; ++p) gb(j, p) += gv * A(i, p);
        }
    }
  });
}

// ---------------------------------------------------------------------------
// Elementwise

inline Var add(Var a, Var b) {
  detail::require_same_shape(a, b, "add");
  Matrix out = a.value();
  const Matrix& B = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += B[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().emit(std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    for (std::size_t id : {ia, ib}) {
      if (!t.requires_grad(id)) continue;
      Matrix& gi = t.grad(id);
      for (std::size_t i = 0; i < g.size(); ++i) gi[i] += g[i];
    }
  });
}

inline Var sub(Var a, Var b) {
  detail::require_same_shape(a, b, "sub");
  Matrix out = a.value();
  const Matrix& B = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= B[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().emit(std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    if (t.requires_grad(ia)) {
      Matrix& ga = t.grad(ia);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (t.requires_grad(ib)) {
      Matrix& gb = t.grad(ib);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
    }
  });
}

inline Var mul(Var a, Var b) {
  detail::require_same_shape(a, b, "mul");
  Matrix out = a.value();
  const Matrix& B = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= B[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().emit(std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    const Matrix& A = t.value(ia);
    const Matrix& B = t.value(ib);
    if (t.requires_grad(ia)) {
      Matrix& ga = t.grad(ia);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * B[i];
    }
    if (t.requires_grad(ib)) {
      Matrix& gb = t.grad(ib);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * A[i];
    }
  });
}

inline Var div(Var a, Var b) {
  detail::require_same_shape(a, b, "div");
  Matrix out = a.value();
  const Matrix& B = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= B[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().emit(std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    const Matrix& A = t.value(ia);
    const Matrix& B = t.value(ib);
    if (t.requires_grad(ia)) {
      Matrix& ga = t.grad(ia);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] / B[i];
    }
    if (t.requires_grad(ib)) {
      Matrix& gb = t.grad(ib);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i] * A[i] / (B[i] * B[i]);
    }
  });
}

inline Var scale(Var a, double s) {
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= s;
  const std::size_t ia = a.id();
  return a.tape().emit(std::move(out), {a}, [ia, s](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    Matrix& ga = t.grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += s * g[i];
  });
}

inline Var add_constant(Var a, double c) {
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += c;
  const std::size_t ia = a.id();
  return a.tape().emit(std::move(out), {a}, [ia](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    Matrix& ga = t.grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
  });
}

// x (n x m) + row (1 x m), broadcast over rows.
inline Var add_row(Var x, Var row) {
  const Matrix& X = x.value();
  const Matrix& R = row.value();
  if (R.rows() != 1 || R.cols() != X.cols()) fail(ErrorKind::kValidation, "add_row: shape mismatch");
  Matrix out = X;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += R[j];
  const std::size_t ix = x.id(), ir = row.id();
  return x.tape().emit(std::move(out), {x, row}, [ix, ir](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    if (t.requires_grad(ix)) {
      Matrix& gx = t.grad(ix);
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
    }
    if (t.requires_grad(ir)) {
      Matrix& gr = t.grad(ir);
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) gr[j] += g(i, j);
    }
  });
}

// tanh approximation of GELU.
inline Var gelu(Var a) {
  constexpr double kC = 0.7978845608028654;  // sqrt(2/pi)
  constexpr double kA = 0.044715;
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double x = out[i];
    out[i] = 0.5 * x * (1.0 + std::tanh(kC * (x + kA * x * x * x)));
  }
  const std::size_t ia = a.id();
  return a.tape().emit(std::move(out), {a}, [ia](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    const Matrix& X = t.value(ia);
    Matrix& ga = t.grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = X[i];
      const double th = std::tanh(kC * (x + kA * x * x * x));
      const double d = 0.5 * (1.0 + th) + 0.5 * x * (1.0 - th * th) * kC * (1.0 + 3.0 * kA * x * x);
      ga[i] += g[i] * d;
    }
  });
}

// ---------------------------------------------------------------------------
// Normalization and softmax

// Row-wise layer normalization with gain and bias rows (1 x m).
inline Var layer_norm(Var x, Var gamma, Var beta, double eps = 1e-5) {
  const Matrix& X = x.value();
  const Matrix& G = gamma.value();
  const Matrix& B = beta.value();
  const std::size_t n = X.rows(), m = X.cols();
  if (G.cols() != m || B.cols() != m) fail(ErrorKind::kValidation, "layer_norm: shape mismatch");
  Matrix xhat(n, m);
  std::vector<double> rstd(n);
  Matrix out(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < m; ++j) mean += X(i, j);
    mean /= static_cast<double>(m);
    double var = 0.0;
    for (std::size_t j = 0; j < m; ++j) var += (X(i, j) - mean) * (X(i, j) - mean);
    var /= static_cast<double>(m);
    rstd[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < m; ++j) {
      xhat(i, j) = (X(i, j) - mean) * rstd[i];
      out(i, j) = xhat(i, j) * G[j] + B[j];
    }
  }
  const std::size_t ix = x.id(), ig = gamma.id(), ib = beta.id();
  return x.tape().emit(std::move(out), {x, gamma, beta},
                       [ix, ig, ib, n, m, xhat = std::move(xhat), rstd = std::move(rstd)](Tape& t, std::size_t self) {
                         const Matrix& g = t.grad(self);
                         const Matrix& G = t.value(ig);
                         if (t.requires_grad(ig)) {
                           Matrix& gg = t.grad(ig);
                           for (std::size_t i = 0; i < n; ++i)
                             for (std::size_t j = 0; j < m; ++j) gg[j] += g(i, j) * xhat(i, j);
                         }
                         if (t.requires_grad(ib)) {
                           Matrix& gb = t.grad(ib);
                           for (std::size_t i = 0; i < n; ++i)
                             for (std::size_t j = 0; j < m; ++j) gb[j] += g(i, j);
                         }
                         if (t.requires_grad(ix)) {
                           Matrix& gx = t.grad(ix);
                           const double inv_m = 1.0 / static_cast<double>(m);
                           for (std::size_t i = 0; i < n; ++i) {
                             double mean_d = 0.0, mean_dx = 0.0;
                             for (std::size_t j = 0; j < m; ++j) {
                               const double d = g(i, j) * G[j];
                               mean_d += d;
                               mean_dx += d * xhat(i, j);
                             }
                             mean_d *= inv_m;
                             mean_dx *= inv_m;
                             for (std::size_t j = 0; j < m; ++j) {
                               const double d = g(i, j) * G[j];
                               gx(i, j) += rstd[i] * (d - mean_d - xhat(i, j) * mean_dx);
                             }
                           }
                         }
                       });
}

// Row-wise softmax. Columns with key_mask[j] == false get probability
// exactly zero; an empty mask allows every column.
inline Var softmax_rows(Var x, const std::vector<bool>& key_mask = {}) {
  const Matrix& X = x.value();
  const std::size_t n = X.rows(), m = X.cols();
  if (!key_mask.empty() && key_mask.size() != m) fail(ErrorKind::kValidation, "softmax_rows: mask size mismatch");
  auto allowed = [&](std::size_t j) { return key_mask.empty() || key_mask[j]; };
  Matrix out(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j)
      if (allowed(j)) mx = std::max(mx, X(i, j));
    double z = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (!allowed(j)) continue;
      out(i, j) = std::exp(X(i, j) - mx);
      z += out(i, j);
    }
    for (std::size_t j = 0; j < m; ++j) out(i, j) /= z;
  }
  const std::size_t ix = x.id();
  return x.tape().emit(std::move(out), {x}, [ix, n, m](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    const Matrix& Y = t.value(self);
    Matrix& gx = t.grad(ix);
    for (std::size_t i = 0; i < n; ++i) {
      double dotp = 0.0;
      for (std::size_t j = 0; j < m; ++j) dotp += g(i, j) * Y(i, j);
      for (std::size_t j = 0; j < m; ++j) gx(i, j) += Y(i, j) * (g(i, j) - dotp);
    }
  });
}

// ---------------------------------------------------------------------------
// Indexing and reshaping

// Rows of `table` selected by ids (embedding lookup).
inline Var gather_rows(Var table, const std::vector<std::size_t>& ids) {
  const Matrix& T = table.value();
  Matrix out(ids.size(), T.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= T.rows()) fail(ErrorKind::kValidation, "gather_rows: index out of range");
    auto src = T.row(ids[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  const std::size_t it = table.id();
  return table.tape().emit(std::move(out), {table}, [it, ids](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    Matrix& gt = t.grad(it);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      auto src = g.row(i);
      auto dst = gt.row(ids[i]);
      for (std::size_t j = 0; j < src.size(); ++j) dst[j] += src[j];
    }
  });
}

inline Var take_row(Var x, std::size_t r) { return gather_rows(x, {r}); }

inline Var slice_cols(Var x, std::size_t begin, std::size_t count) {
  const Matrix& X = x.value();
  if (begin + count > X.cols()) fail(ErrorKind::kValidation, "slice_cols: out of range");
  Matrix out(X.rows(), count);
  for (std::size_t i = 0; i < X.rows(); ++i)
    for (std::size_t j = 0; j < count; ++j) out(i, j) = X(i, begin + j);
  const std::size_t ix = x.id();
  return x.tape().emit(std::move(out), {x}, [ix, begin, count](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    Matrix& gx = t.grad(ix);
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < count; ++j) gx(i, begin + j) += g(i, j);
  });
}

inline Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) fail(ErrorKind::kValidation, "concat_cols: nothing to concatenate");
  const std::size_t n = parts.front().rows();
  std::size_t total = 0;
  std::vector<std::size_t> offsets, ids;
  for (const auto& p : parts) {
    if (p.rows() != n) fail(ErrorKind::kValidation, "concat_cols: row count mismatch");
    offsets.push_back(total);
    ids.push_back(p.id());
    total += p.cols();
  }
  Matrix out(n, total);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Matrix& P = parts[k].value();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < P.cols(); ++j) out(i, offsets[k] + j) = P(i, j);
  }
  Tape& tape = parts.front().tape();
  return tape.emit_any(std::move(out), parts.begin(), parts.end(), [ids, offsets](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (!t.requires_grad(ids[k])) continue;
      Matrix& gp = t.grad(ids[k]);
      for (std::size_t i = 0; i < gp.rows(); ++i)
        for (std::size_t j = 0; j < gp.cols(); ++j) gp(i, j) += g(i, offsets[k] + j);
    }
  });
}

// ---------------------------------------------------------------------------
// Reductions

inline Var sum(Var x) {
  double s = 0.0;
  for (double v : x.value().values()) s += v;
  const std::size_t ix = x.id();
  return x.tape().emit(Matrix(1, 1, s), {x}, [ix](Tape& t, std::size_t self) {
    const double g = t.grad(self)[0];
    Matrix& gx = t.grad(ix);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g;
  });
}

inline Var dot(Var a, Var b) { return sum(mul(a, b)); }

// Euclidean norm of all entries; the subgradient at zero is taken as zero.
inline Var norm(Var x) {
  const double nrm = std::sqrt(x.value().squared_norm());
  const std::size_t ix = x.id();
  return x.tape().emit(Matrix(1, 1, nrm), {x}, [ix](Tape& t, std::size_t self) {
    const double g = t.grad(self)[0];
    const double nrm = t.value(self)[0];
    if (nrm == 0.0) return;
    const Matrix& X = t.value(ix);
    Matrix& gx = t.grad(ix);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g * X[i] / nrm;
  });
}

inline double log_sum_exp(std::span<const double> xs) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : xs) mx = std::max(mx, v);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double v : xs) s += std::exp(v - mx);
  return mx + std::log(s);
}

// x[index] - logsumexp(x) over a single row.
inline Var log_softmax_pick(Var x, std::size_t index) {
  const Matrix& X = x.value();
  if (X.rows() != 1 || index >= X.cols()) fail(ErrorKind::kValidation, "log_softmax_pick: bad shape or index");
  const double lse = log_sum_exp(X.values());
  const std::size_t ix = x.id();
  return x.tape().emit(Matrix(1, 1, X[index] - lse), {x}, [ix, index, lse](Tape& t, std::size_t self) {
    const double g = t.grad(self)[0];
    const Matrix& X = t.value(ix);
    Matrix& gx = t.grad(ix);
    for (std::size_t j = 0; j < X.cols(); ++j) gx[j] -= g * std::exp(X[j] - lse);
    gx[index] += g;
  });
}

// Mean over rows of -ln softmax(row)[target].
inline Var cross_entropy_rows(Var logits, const std::vector<std::size_t>& targets) {
  const Matrix& L = logits.value();
  if (targets.size() != L.rows() || targets.empty()) fail(ErrorKind::kValidation, "cross_entropy_rows: bad targets");
  std::vector<double> lse(L.rows());
  double total = 0.0;
  for (std::size_t i = 0; i < L.rows(); ++i) {
    if (targets[i] >= L.cols()) fail(ErrorKind::kValidation, "cross_entropy_rows: target out of range");
    lse[i] = log_sum_exp(L.row(i));
    total += lse[i] - L(i, targets[i]);
  }
  const double n = static_cast<double>(L.rows());
  const std::size_t il = logits.id();
  return logits.tape().emit(Matrix(1, 1, total / n), {logits},
                            [il, targets, lse = std::move(lse), n](Tape& t, std::size_t self) {
                              const double g = t.grad(self)[0] / n;
                              const Matrix& L = t.value(il);
                              Matrix& gl = t.grad(il);
                              for (std::size_t i = 0; i < L.rows(); ++i) {
                                for (std::size_t j = 0; j < L.cols(); ++j) gl(i, j) += g * std::exp(L(i, j) - lse[i]);
                                gl(i, targets[i]) -= g;
                              }
                            });
}

// Inverted dropout with a mask drawn from rng; identity when rate == 0.
inline Var dropout(Var x, double rate, Rng& rng) {
  if (rate <= 0.0) return x;
  const double keep = 1.0 - rate;
  Matrix mask(x.rows(), x.cols());
  std::bernoulli_distribution coin(keep);
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = coin(rng) ? 1.0 / keep : 0.0;
  return mul(x, x.tape().constant(std::move(mask)));
}

}  // namespace ktl::nn
