#include "specint/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace specint {

namespace {

[[noreturn]] void shape_error(const std::string& op, const Array& a, const Array& b) {
  throw std::invalid_argument(op + ": mismatched shapes " + shape_str(a.shape()) +
                              " and " + shape_str(b.shape()));
}

// Broadcast classification for elementwise binary ops.
enum class Bcast { None, ScalarRhs, LeadingRhs };

Bcast classify(const std::string& op, const Array& a, const Array& b) {
  if (a.same_shape(b)) return Bcast::None;
  if (b.rank() == 0) return Bcast::ScalarRhs;
  if (a.rank() == b.rank() + 1 &&
      std::equal(a.shape().begin() + 1, a.shape().end(), b.shape().begin()))
    return Bcast::LeadingRhs;
  shape_error(op, a, b);
}

}  // namespace

NodePtr leaf(Array v) { return std::make_shared<Node>(std::move(v), true); }

NodePtr constant(Array v) { return std::make_shared<Node>(std::move(v), false); }

NodePtr make_op(Array value, std::vector<NodePtr> parents,
                std::function<void(const Node&)> backprop) {
  auto n = std::make_shared<Node>(std::move(value));
  bool any = false;
  for (const auto& p : parents) any = any || p->requires_grad;
  n->requires_grad = any;
  if (any) {
    n->parents = std::move(parents);
    n->backprop = std::move(backprop);
  }
  return n;
}

// ---------------------------------------------------------------------------
// elementwise

namespace {

template <typename Fwd>
NodePtr binary_elementwise(const std::string& name, const NodePtr& a, const NodePtr& b,
                           Fwd f, double da_coef, double db_coef) {
  // f(x, y) with constant partials da_coef, db_coef is enough for add/sub;
  // mul needs the operand values and is handled separately.
  const Bcast bc = classify(name, a->value, b->value);
  const std::size_t n = a->value.size();
  const std::size_t bn = b->value.size();
  Array out(a->value.shape());
  for (std::size_t i = 0; i < n; ++i) {
    const double bv = bc == Bcast::ScalarRhs ? b->value[0] : b->value[i % bn];
    out[i] = f(a->value[i], bv);
  }
  return make_op(std::move(out), {a, b}, [bc, da_coef, db_coef](const Node& self) {
    auto& pa = *self.parents[0];
    auto& pb = *self.parents[1];
    const std::size_t n = self.grad.size();
    const std::size_t bn = pb.value.size();
    if (pa.requires_grad)
      for (std::size_t i = 0; i < n; ++i) pa.grad[i] += da_coef * self.grad[i];
    if (pb.requires_grad) {
      if (bc == Bcast::None) {
        for (std::size_t i = 0; i < n; ++i) pb.grad[i] += db_coef * self.grad[i];
      } else if (bc == Bcast::ScalarRhs) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += self.grad[i];
        pb.grad[0] += db_coef * acc;
      } else {
        for (std::size_t i = 0; i < n; ++i) pb.grad[i % bn] += db_coef * self.grad[i];
      }
    }
  });
}

}  // namespace

NodePtr add(const NodePtr& a, const NodePtr& b) {
  return binary_elementwise("add", a, b, [](double x, double y) { return x + y; }, 1.0, 1.0);
}

NodePtr sub(const NodePtr& a, const NodePtr& b) {
  return binary_elementwise("sub", a, b, [](double x, double y) { return x - y; }, 1.0, -1.0);
}

NodePtr mul(const NodePtr& a, const NodePtr& b) {
  const Bcast bc = classify("mul", a->value, b->value);
  const std::size_t n = a->value.size();
  const std::size_t bn = b->value.size();
  Array out(a->value.shape());
  for (std::size_t i = 0; i < n; ++i) {
    const double bv = bc == Bcast::ScalarRhs ? b->value[0] : b->value[i % bn];
    out[i] = a->value[i] * bv;
  }
  return make_op(std::move(out), {a, b}, [bc](const Node& self) {
    auto& pa = *self.parents[0];
    auto& pb = *self.parents[1];
    const std::size_t n = self.grad.size();
    const std::size_t bn = pb.value.size();
    if (pa.requires_grad) {
      for (std::size_t i = 0; i < n; ++i) {
        const double bv = bc == Bcast::ScalarRhs ? pb.value[0] : pb.value[i % bn];
        pa.grad[i] += bv * self.grad[i];
      }
    }
    if (pb.requires_grad) {
      if (bc == Bcast::None) {
        for (std::size_t i = 0; i < n; ++i) pb.grad[i] += pa.value[i] * self.grad[i];
      } else if (bc == Bcast::ScalarRhs) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += pa.value[i] * self.grad[i];
        pb.grad[0] += acc;
      } else {
        for (std::size_t i = 0; i < n; ++i)
          pb.grad[i % bn] += pa.value[i] * self.grad[i];
      }
    }
  });
}

NodePtr scale(const NodePtr& a, double c) {
  Array out(a->value.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * a->value[i];
  return make_op(std::move(out), {a}, [c](const Node& self) {
    auto& pa = *self.parents[0];
    if (!pa.requires_grad) return;
    for (std::size_t i = 0; i < self.grad.size(); ++i) pa.grad[i] += c * self.grad[i];
  });
}

// ---------------------------------------------------------------------------
// matmul

namespace {

// C[m x n] += A[m x k] * B[k x n], ikj order for contiguous inner loops.
void gemm_acc(const double* A, const double* B, double* C, std::size_t m,
              std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* a_row = A + i * k;
    double* c_row = C + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double a = a_row[p];
      if (a == 0.0) continue;
      const double* b_row = B + p * n;
      for (std::size_t j = 0; j < n; ++j) c_row[j] += a * b_row[j];
    }
  }
}

// C[m x n] += A^T, with A given as [k x m]: C = A^T * B for A [k x m], B [k x n].
void gemm_at_b_acc(const double* A, const double* B, double* C, std::size_t k,
                   std::size_t m, std::size_t n) {
  for (std::size_t p = 0; p < k; ++p) {
    const double* a_row = A + p * m;
    const double* b_row = B + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double a = a_row[i];
      if (a == 0.0) continue;
      double* c_row = C + i * n;
      for (std::size_t j = 0; j < n; ++j) c_row[j] += a * b_row[j];
    }
  }
}

// C[m x k] += A[m x n] * B^T, with B given as [k x n].
void gemm_a_bt_acc(const double* A, const double* B, double* C, std::size_t m,
                   std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* a_row = A + i * n;
    double* c_row = C + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double* b_row = B + p * n;
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += a_row[j] * b_row[j];
      c_row[p] += acc;
    }
  }
}

}  // namespace

NodePtr matmul(const NodePtr& a, const NodePtr& b) {
  const Array& A = a->value;
  const Array& B = b->value;
  if (A.rank() != 2 || B.rank() != 2 || A.dim(1) != B.dim(0)) shape_error("matmul", A, B);
  const std::size_t m = A.dim(0), k = A.dim(1), n = B.dim(1);
  Array out({m, n});
  gemm_acc(A.data(), B.data(), out.data(), m, k, n);
  return make_op(std::move(out), {a, b}, [m, k, n](const Node& self) {
    auto& pa = *self.parents[0];
    auto& pb = *self.parents[1];
    // dA = G * B^T, dB = A^T * G
    if (pa.requires_grad)
      gemm_a_bt_acc(self.grad.data(), pb.value.data(), pa.grad.data(), m, n, k);
    if (pb.requires_grad)
      gemm_at_b_acc(pa.value.data(), self.grad.data(), pb.grad.data(), m, k, n);
  });
}

// ---------------------------------------------------------------------------
// shape ops

NodePtr concat(const std::vector<NodePtr>& parts, std::size_t axis) {
  if (parts.empty()) throw std::invalid_argument("concat: empty part list");
  const std::size_t rank = parts[0]->value.rank();
  if (rank == 0 || rank > 2 || axis >= rank)
    throw std::invalid_argument("concat: unsupported rank/axis");
  for (const auto& p : parts) {
    if (p->value.rank() != rank) shape_error("concat", parts[0]->value, p->value);
    for (std::size_t d = 0; d < rank; ++d)
      if (d != axis && p->value.dim(d) != parts[0]->value.dim(d))
        shape_error("concat", parts[0]->value, p->value);
  }

  Shape out_shape = parts[0]->value.shape();
  out_shape[axis] = 0;
  for (const auto& p : parts) out_shape[axis] += p->value.dim(axis);
  Array out(out_shape);

  if (rank == 1 || axis == 0) {
    std::size_t off = 0;
    for (const auto& p : parts) {
      std::copy(p->value.data(), p->value.data() + p->value.size(), out.data() + off);
      off += p->value.size();
    }
  } else {  // rank 2, axis 1
    const std::size_t rows = out_shape[0], cols = out_shape[1];
    std::size_t col_off = 0;
    for (const auto& p : parts) {
      const std::size_t pc = p->value.dim(1);
      for (std::size_t i = 0; i < rows; ++i)
        std::copy(p->value.data() + i * pc, p->value.data() + (i + 1) * pc,
                  out.data() + i * cols + col_off);
      col_off += pc;
    }
  }

  return make_op(std::move(out), parts, [rank, axis](const Node& self) {
    if (rank == 1 || axis == 0) {
      std::size_t off = 0;
      for (const auto& pp : self.parents) {
        Node& p = *pp;
        if (p.requires_grad)
          for (std::size_t i = 0; i < p.value.size(); ++i) p.grad[i] += self.grad[off + i];
        off += p.value.size();
      }
    } else {
      const std::size_t rows = self.value.dim(0), cols = self.value.dim(1);
      std::size_t col_off = 0;
      for (const auto& pp : self.parents) {
        Node& p = *pp;
        const std::size_t pc = p.value.dim(1);
        if (p.requires_grad)
          for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < pc; ++j)
              p.grad[i * pc + j] += self.grad[i * cols + col_off + j];
        col_off += pc;
      }
    }
  });
}

NodePtr reshape(const NodePtr& a, Shape shape) {
  if (shape_size(shape) != a->value.size())
    throw std::invalid_argument("reshape: size mismatch " + shape_str(a->value.shape()) +
                                " -> " + shape_str(shape));
  Array out(std::move(shape), a->value.vec());
  return make_op(std::move(out), {a}, [](const Node& self) {
    auto& pa = *self.parents[0];
    if (!pa.requires_grad) return;
    for (std::size_t i = 0; i < self.grad.size(); ++i) pa.grad[i] += self.grad[i];
  });
}

NodePtr slice_cols(const NodePtr& a, std::size_t c0, std::size_t c1) {
  const Array& A = a->value;
  if (A.rank() != 2 || c1 > A.dim(1) || c0 >= c1)
    throw std::invalid_argument("slice_cols: bad column range on " + shape_str(A.shape()));
  const std::size_t m = A.dim(0), n = A.dim(1), w = c1 - c0;
  Array out({m, w});
  for (std::size_t i = 0; i < m; ++i)
    std::copy(A.data() + i * n + c0, A.data() + i * n + c1, out.data() + i * w);
  return make_op(std::move(out), {a}, [m, n, w, c0](const Node& self) {
    auto& pa = *self.parents[0];
    if (!pa.requires_grad) return;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < w; ++j)
        pa.grad[i * n + c0 + j] += self.grad[i * w + j];
  });
}

// ---------------------------------------------------------------------------
// reductions and broadcast helpers

NodePtr sum(const NodePtr& a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a->value.size(); ++i) acc += a->value[i];
  return make_op(Array::scalar(acc), {a}, [](const Node& self) {
    auto& pa = *self.parents[0];
    if (!pa.requires_grad) return;
    const double g = self.grad[0];
    for (std::size_t i = 0; i < pa.grad.size(); ++i) pa.grad[i] += g;
  });
}

NodePtr mean(const NodePtr& a) {
  const std::size_t n = a->value.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a->value[i];
  return make_op(Array::scalar(acc / static_cast<double>(n)), {a}, [n](const Node& self) {
    auto& pa = *self.parents[0];
    if (!pa.requires_grad) return;
    const double g = self.grad[0] / static_cast<double>(n);
    for (std::size_t i = 0; i < pa.grad.size(); ++i) pa.grad[i] += g;
  });
}

NodePtr mean_axis0(const NodePtr& a) {
  const Array& A = a->value;
  if (A.rank() != 2) throw std::invalid_argument("mean_axis0: need rank 2, got " + shape_str(A.shape()));
  const std::size_t m = A.dim(0), n = A.dim(1);
  Array out({n});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j] += A.at(i, j);
  for (std::size_t j = 0; j < n; ++j) out[j] /= static_cast<double>(m);
  return make_op(std::move(out), {a}, [m, n](const Node& self) {
    auto& pa = *self.parents[0];
    if (!pa.requires_grad) return;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        pa.grad[i * n + j] += self.grad[j] / static_cast<double>(m);
  });
}

NodePtr tile_scalar(const NodePtr& s, std::size_t m) {
  if (s->value.size() != 1)
    throw std::invalid_argument("tile_scalar: need scalar, got " + shape_str(s->value.shape()));
  Array out = Array::full({m}, s->value[0]);
  return make_op(std::move(out), {s}, [](const Node& self) {
    auto& pa = *self.parents[0];
    if (!pa.requires_grad) return;
    double acc = 0.0;
    for (std::size_t i = 0; i < self.grad.size(); ++i) acc += self.grad[i];
    pa.grad[0] += acc;
  });
}

// ---------------------------------------------------------------------------
// nonlinearities

namespace {

template <typename F, typename DF>
NodePtr unary_elementwise(const NodePtr& a, F f, DF df_from_out) {
  Array out(a->value.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(a->value[i]);
  return make_op(std::move(out), {a}, [df_from_out](const Node& self) {
    auto& pa = *self.parents[0];
    if (!pa.requires_grad) return;
    for (std::size_t i = 0; i < self.grad.size(); ++i)
      pa.grad[i] += df_from_out(self.value[i], pa.value[i]) * self.grad[i];
  });
}

}  // namespace

NodePtr tanh_op(const NodePtr& a) {
  return unary_elementwise(
      a, [](double x) { return std::tanh(x); },
      [](double y, double) { return 1.0 - y * y; });
}

NodePtr sigmoid(const NodePtr& a) {
  return unary_elementwise(
      a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
      [](double y, double) { return y * (1.0 - y); });
}

NodePtr relu(const NodePtr& a) {
  return unary_elementwise(
      a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double, double x) { return x > 0.0 ? 1.0 : 0.0; });
}

NodePtr activation(const std::string& name, const NodePtr& a) {
  if (name == "tanh") return tanh_op(a);
  if (name == "sigmoid") return sigmoid(a);
  if (name == "relu") return relu(a);
  throw std::invalid_argument("activation: unknown nonlinearity '" + name + "'");
}

// ---------------------------------------------------------------------------
// conv1d

NodePtr conv1d(const NodePtr& signal, const NodePtr& kernel, std::size_t stride,
               const NodePtr& bias) {
  const Array& S = signal->value;
  const Array& K = kernel->value;
  if (S.rank() != 2 || K.rank() != 1) shape_error("conv1d", S, K);
  if (bias->value.size() != 1)
    throw std::invalid_argument("conv1d: bias must be scalar, got " +
                                shape_str(bias->value.shape()));
  if (stride < 1) throw std::invalid_argument("conv1d: stride must be >= 1");
  const std::size_t batch = S.dim(0), L = S.dim(1), k = K.dim(0);
  if (k > L)
    throw std::invalid_argument("conv1d: kernel width " + std::to_string(k) +
                                " exceeds signal length " + std::to_string(L));
  const std::size_t Lp = (L - k) / stride + 1;
  const double b0 = bias->value[0];
  Array out({batch, Lp});
  for (std::size_t bi = 0; bi < batch; ++bi) {
    const double* srow = S.data() + bi * L;
    double* orow = out.data() + bi * Lp;
    for (std::size_t j = 0; j < Lp; ++j) {
      double acc = b0;
      const double* w = srow + j * stride;
      for (std::size_t p = 0; p < k; ++p) acc += w[p] * K[p];
      orow[j] = acc;
    }
  }
  return make_op(std::move(out), {signal, kernel, bias},
                 [batch, L, k, Lp, stride](const Node& self) {
                   auto& ps = *self.parents[0];
                   auto& pk = *self.parents[1];
                   auto& pb = *self.parents[2];
                   for (std::size_t bi = 0; bi < batch; ++bi) {
                     const double* grow = self.grad.data() + bi * Lp;
                     const double* srow = ps.value.data() + bi * L;
                     double* dsrow = ps.grad.data() + bi * L;
                     for (std::size_t j = 0; j < Lp; ++j) {
                       const double g = grow[j];
                       if (g == 0.0) continue;
                       const std::size_t off = j * stride;
                       if (ps.requires_grad)
                         for (std::size_t p = 0; p < k; ++p)
                           dsrow[off + p] += g * pk.value[p];
                       if (pk.requires_grad)
                         for (std::size_t p = 0; p < k; ++p)
                           pk.grad[p] += g * srow[off + p];
                       if (pb.requires_grad) pb.grad[0] += g;
                     }
                   }
                 });
}

NodePtr conv1d_multi(const NodePtr& signal, const NodePtr& kernels,
                     std::size_t stride, const NodePtr& bias) {
  const Array& S = signal->value;
  const Array& K = kernels->value;
  if (S.rank() != 2 || K.rank() != 3 || K.dim(1) != S.dim(0)) shape_error("conv1d_multi", S, K);
  if (stride < 1) throw std::invalid_argument("conv1d_multi: stride must be >= 1");
  const std::size_t cin = S.dim(0), L = S.dim(1);
  const std::size_t cout = K.dim(0), k = K.dim(2);
  if (bias->value.size() != cout) shape_error("conv1d_multi bias", K, bias->value);
  if (k > L)
    throw std::invalid_argument("conv1d_multi: kernel width " + std::to_string(k) +
                                " exceeds signal length " + std::to_string(L));
  const std::size_t Lp = (L - k) / stride + 1;
  Array out({cout, Lp});
  for (std::size_t co = 0; co < cout; ++co) {
    double* orow = out.data() + co * Lp;
    for (std::size_t j = 0; j < Lp; ++j) orow[j] = bias->value[co];
    for (std::size_t ci = 0; ci < cin; ++ci) {
      const double* srow = S.data() + ci * L;
      const double* krow = K.data() + (co * cin + ci) * k;
      for (std::size_t j = 0; j < Lp; ++j) {
        const double* w = srow + j * stride;
        double acc = 0.0;
        for (std::size_t p = 0; p < k; ++p) acc += w[p] * krow[p];
        orow[j] += acc;
      }
    }
  }
  return make_op(std::move(out), {signal, kernels, bias},
                 [cin, cout, L, k, Lp, stride](const Node& self) {
                   auto& ps = *self.parents[0];
                   auto& pk = *self.parents[1];
                   auto& pb = *self.parents[2];
                   for (std::size_t co = 0; co < cout; ++co) {
                     const double* grow = self.grad.data() + co * Lp;
                     if (pb.requires_grad)
                       for (std::size_t j = 0; j < Lp; ++j) pb.grad[co] += grow[j];
                     for (std::size_t ci = 0; ci < cin; ++ci) {
                       const double* srow = ps.value.data() + ci * L;
                       double* dsrow = ps.grad.data() + ci * L;
                       const double* krow = pk.value.data() + (co * cin + ci) * k;
                       double* dkrow = pk.grad.data() + (co * cin + ci) * k;
                       for (std::size_t j = 0; j < Lp; ++j) {
                         const double g = grow[j];
                         if (g == 0.0) continue;
                         const std::size_t off = j * stride;
                         if (ps.requires_grad)
                           for (std::size_t p = 0; p < k; ++p) dsrow[off + p] += g * krow[p];
                         if (pk.requires_grad)
                           for (std::size_t p = 0; p < k; ++p) dkrow[p] += g * srow[off + p];
                       }
                     }
                   }
                 });
}

// ---------------------------------------------------------------------------
// cross entropy

NodePtr cross_entropy(const NodePtr& logits, const std::vector<int>& labels) {
  const Array& Z = logits->value;
  if (Z.rank() != 2)
    throw std::invalid_argument("cross_entropy: logits must be rank 2, got " +
                                shape_str(Z.shape()));
  const std::size_t batch = Z.dim(0), C = Z.dim(1);
  if (C < 2) throw std::invalid_argument("cross_entropy: need C >= 2 classes");
  if (labels.size() != batch)
    throw std::invalid_argument("cross_entropy: got " + std::to_string(labels.size()) +
                                " labels for batch " + std::to_string(batch));
  for (std::size_t i = 0; i < batch; ++i)
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= C)
      throw std::out_of_range("cross_entropy: label " + std::to_string(labels[i]) +
                              " out of range [0, " + std::to_string(C) + ") at row " +
                              std::to_string(i));

  // softmax probabilities are recorded for the backward rule
  auto probs = std::make_shared<std::vector<double>>(batch * C);
  double loss = 0.0;
  for (std::size_t i = 0; i < batch; ++i) {
    const double* row = Z.data() + i * C;
    double mx = row[0];
    for (std::size_t j = 1; j < C; ++j) mx = std::max(mx, row[j]);
    double denom = 0.0;
    for (std::size_t j = 0; j < C; ++j) denom += std::exp(row[j] - mx);
    const double log_denom = std::log(denom);
    loss += log_denom - (row[labels[i]] - mx);
    for (std::size_t j = 0; j < C; ++j)
      (*probs)[i * C + j] = std::exp(row[j] - mx) / denom;
  }
  loss /= static_cast<double>(batch);

  return make_op(Array::scalar(loss), {logits},
                 [probs, labels, batch, C](const Node& self) {
                   auto& pl = *self.parents[0];
                   if (!pl.requires_grad) return;
                   const double g = self.grad[0] / static_cast<double>(batch);
                   for (std::size_t i = 0; i < batch; ++i)
                     for (std::size_t j = 0; j < C; ++j) {
                       double d = (*probs)[i * C + j];
                       if (static_cast<std::size_t>(labels[i]) == j) d -= 1.0;
                       pl.grad[i * C + j] += g * d;
                     }
                 });
}

// ---------------------------------------------------------------------------
// backward

std::vector<Node*> topo_order(const NodePtr& root) {
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  // Iterative post-order DFS; children are pushed in parent-list order, so
  // the traversal (and thus gradient accumulation order) is reproducible.
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(root.get(), 0);
  visited.insert(root.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* p = node->parents[next++].get();
      if (p->requires_grad && !visited.count(p)) {
        visited.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  // order is post-order (parents before children); reverse for backprop.
  std::reverse(order.begin(), order.end());
  return order;
}

void backward(const NodePtr& loss) {
  if (loss->value.size() != 1)
    throw std::invalid_argument("backward: loss must be scalar, got " +
                                shape_str(loss->value.shape()));
  if (!loss->requires_grad) return;
  const auto order = topo_order(loss);
  // Interior adjoints are per-pass scratch; only leaf grads (parameters)
  // persist and accumulate across backward() calls.
  for (Node* n : order)
    if (n->backprop) n->grad.fill(0.0);
  loss->grad[0] += 1.0;
  for (Node* n : order)
    if (n->backprop) n->backprop(*n);
}

// ---------------------------------------------------------------------------
// parameters

NodePtr ParamRegistry::add_param(const std::string& name, Array init) {
  for (const auto& p : params_)
    if (p.name == name)
      throw std::logic_error("ParamRegistry: duplicate parameter '" + name + "'");
  params_.push_back({name, leaf(std::move(init)), true});
  return params_.back().node;
}

void ParamRegistry::zero_grad() {
  for (auto& p : params_) p.node->grad.fill(0.0);
}

std::vector<Array> ParamRegistry::snapshot_values() const {
  std::vector<Array> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p.node->value);
  return out;
}

void ParamRegistry::restore_values(const std::vector<Array>& values) {
  if (values.size() != params_.size())
    throw std::logic_error("ParamRegistry: snapshot size mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i].same_shape(params_[i].node->value))
      throw std::logic_error("ParamRegistry: snapshot shape mismatch at '" +
                             params_[i].name + "'");
    params_[i].node->value = values[i];
  }
}

}  // namespace specint
