// Copyright 2026 The roomecho Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "roomecho/autodiff.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>

#include "roomecho/error.hpp"

namespace roomecho::ad {

std::size_t element_count(const Shape& shape) {
  std::size_t n = 1;
  for (int d : shape) n *= static_cast<std::size_t>(d);
  return n;
}

std::string shape_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

namespace {

template <class T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using MatMap = Eigen::Map<RowMat<T>>;
template <class T>
using ConstMatMap = Eigen::Map<const RowMat<T>>;

template <class T>
using NodePtr = std::shared_ptr<Node<T>>;

template <class T>
ConstMatMap<T> as_mat(const std::vector<T>& v, int rows, int cols) {
  return ConstMatMap<T>(v.data(), rows, cols);
}
template <class T>
MatMap<T> as_mat(std::vector<T>& v, int rows, int cols) {
  return MatMap<T>(v.data(), rows, cols);
}

// (rows, cols) view of a rank-1 or rank-2 tensor.
std::pair<int, int> as2d(const Shape& s, const char* op) {
  if (s.size() == 1) return {1, s[0]};
  if (s.size() == 2) return {s[0], s[1]};
  fail(ErrorCode::kShape, std::string(op) + ": expected rank 1 or 2, got " + shape_string(s));
}

template <class T>
Var<T> make_result(Shape shape, std::vector<NodePtr<T>> inputs) {
  auto n = std::make_shared<Node<T>>();
  n->value.assign(element_count(shape), T(0));
  n->shape = std::move(shape);
  for (const auto& in : inputs) n->requires_grad = n->requires_grad || in->requires_grad;
  if (n->requires_grad) n->inputs = std::move(inputs);
  return Var<T>(n);
}

template <class T>
std::vector<T>* grad_of(Node<T>& self, std::size_t i) {
  Node<T>& in = *self.inputs[i];
  if (!in.requires_grad) return nullptr;
  in.ensure_grad();
  return &in.grad;
}

template <class T>
void check_same(const Var<T>& a, const Var<T>& b, const char* op) {
  require(a.shape() == b.shape(), ErrorCode::kShape,
          std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
              shape_string(b.shape()));
}

}  // namespace

// ---------------------------------------------------------------------------
// Var

template <class T>
Var<T> Var<T>::constant(Shape shape, std::vector<T> values) {
  require(element_count(shape) == values.size(), ErrorCode::kShape,
          "constant: value count does not match " + shape_string(shape));
  auto n = std::make_shared<Node<T>>();
  n->shape = std::move(shape);
  n->value = std::move(values);
  return Var(n);
}

template <class T>
Var<T> Var<T>::parameter(Shape shape, std::vector<T> values) {
  Var v = constant(std::move(shape), std::move(values));
  v.node_->requires_grad = true;
  v.node_->ensure_grad();
  return v;
}

template <class T>
Var<T> Var<T>::zeros(Shape shape) {
  const std::size_t n = element_count(shape);
  return constant(std::move(shape), std::vector<T>(n, T(0)));
}

template <class T>
T Var<T>::item() const {
  require(size() == 1, ErrorCode::kShape, "item() on non-scalar " + shape_string(shape()));
  return node_->value[0];
}

template <class T>
void backward(const Var<T>& root) {
  require(root.size() == 1, ErrorCode::kShape, "backward() needs a scalar root");
  if (!root.requires_grad()) return;
  // Iterative post-order DFS gives a topological order.
  std::vector<Node<T>*> order;
  std::unordered_set<Node<T>*> visited;
  std::vector<std::pair<Node<T>*, std::size_t>> stack{{root.node(), 0}};
  visited.insert(root.node());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node<T>* child = node->inputs[next++].get();
      if (child->requires_grad && visited.insert(child).second) stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  root.node()->ensure_grad();
  root.node()->grad[0] += T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node<T>* n = *it;
    if (n->backward_fn && !n->grad.empty()) n->backward_fn(*n);
  }
}

// ---------------------------------------------------------------------------
// Linear algebra

template <class T>
Var<T> matmul(const Var<T>& a, const Var<T>& b) {
  const auto [m, k] = as2d(a.shape(), "matmul");
  const auto [k2, n] = as2d(b.shape(), "matmul");
  require(k == k2, ErrorCode::kShape,
          "matmul: inner dims " + shape_string(a.shape()) + " x " + shape_string(b.shape()));
  Var<T> out = make_result<T>({m, n}, {a.shared(), b.shared()});
  as_mat(out.mutable_value(), m, n).noalias() = as_mat(a.value(), m, k) * as_mat(b.value(), k, n);
  if (out.requires_grad()) {
    out.node()->backward_fn = [m, k, n](Node<T>& self) {
      const auto g = as_mat(self.grad, m, n);
      if (auto* ga = grad_of(self, 0)) {
        as_mat(*ga, m, k).noalias() += g * as_mat(self.inputs[1]->value, k, n).transpose();
      }
      if (auto* gb = grad_of(self, 1)) {
        as_mat(*gb, k, n).noalias() += as_mat(self.inputs[0]->value, m, k).transpose() * g;
      }
    };
  }
  return out;
}

template <class T>
Var<T> matmul_nt(const Var<T>& a, const Var<T>& b) {
  const auto [m, k] = as2d(a.shape(), "matmul_nt");
  const auto [n, k2] = as2d(b.shape(), "matmul_nt");
  require(k == k2, ErrorCode::kShape,
          "matmul_nt: inner dims " + shape_string(a.shape()) + " x " + shape_string(b.shape()) + "^T");
  Var<T> out = make_result<T>({m, n}, {a.shared(), b.shared()});
  as_mat(out.mutable_value(), m, n).noalias() =
      as_mat(a.value(), m, k) * as_mat(b.value(), n, k).transpose();
  if (out.requires_grad()) {
    out.node()->backward_fn = [m, k, n](Node<T>& self) {
      const auto g = as_mat(self.grad, m, n);
      if (auto* ga = grad_of(self, 0)) {
        as_mat(*ga, m, k).noalias() += g * as_mat(self.inputs[1]->value, n, k);
      }
      if (auto* gb = grad_of(self, 1)) {
        as_mat(*gb, n, k).noalias() += g.transpose() * as_mat(self.inputs[0]->value, m, k);
      }
    };
  }
  return out;
}

template <class T>
Var<T> transpose(const Var<T>& a) {
  const auto [m, n] = as2d(a.shape(), "transpose");
  Var<T> out = make_result<T>({n, m}, {a.shared()});
  as_mat(out.mutable_value(), n, m) = as_mat(a.value(), m, n).transpose();
  if (out.requires_grad()) {
    out.node()->backward_fn = [m, n](Node<T>& self) {
      if (auto* ga = grad_of(self, 0)) as_mat(*ga, m, n) += as_mat(self.grad, n, m).transpose();
    };
  }
  return out;
}

// ---------------------------------------------------------------------------
// Elementwise

template <class T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
  check_same(a, b, "add");
  Var<T> out = make_result<T>(a.shape(), {a.shared(), b.shared()});
  auto& y = out.mutable_value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a.value()[i] + b.value()[i];
  if (out.requires_grad()) {
    out.node()->backward_fn = [](Node<T>& self) {
      for (std::size_t k = 0; k < 2; ++k) {
        if (auto* g = grad_of(self, k)) {
          for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] += self.grad[i];
        }
      }
    };
  }
  return out;
}

template <class T>
Var<T> sub(const Var<T>& a, const Var<T>& b) {
  check_same(a, b, "sub");
  Var<T> out = make_result<T>(a.shape(), {a.shared(), b.shared()});
  auto& y = out.mutable_value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a.value()[i] - b.value()[i];
  if (out.requires_grad()) {
    out.node()->backward_fn = [](Node<T>& self) {
      if (auto* g = grad_of(self, 0)) {
        for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] += self.grad[i];
      }
      if (auto* g = grad_of(self, 1)) {
        for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] -= self.grad[i];
      }
    };
  }
  return out;
}

template <class T>
Var<T> mul(const Var<T>& a, const Var<T>& b) {
  check_same(a, b, "mul");
  Var<T> out = make_result<T>(a.shape(), {a.shared(), b.shared()});
  auto& y = out.mutable_value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a.value()[i] * b.value()[i];
  if (out.requires_grad()) {
    out.node()->backward_fn = [](Node<T>& self) {
      const auto& av = self.inputs[0]->value;
      const auto& bv = self.inputs[1]->value;
      if (auto* g = grad_of(self, 0)) {
        for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] += self.grad[i] * bv[i];
      }
      if (auto* g = grad_of(self, 1)) {
        for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] += self.grad[i] * av[i];
      }
    };
  }
  return out;
}

template <class T>
Var<T> scale(const Var<T>& a, T s) {
  Var<T> out = make_result<T>(a.shape(), {a.shared()});
  auto& y = out.mutable_value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = s * a.value()[i];
  if (out.requires_grad()) {
    out.node()->backward_fn = [s](Node<T>& self) {
      if (auto* g = grad_of(self, 0)) {
        for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] += s * self.grad[i];
      }
    };
  }
  return out;
}

template <class T>
Var<T> gelu(const Var<T>& a) {
  Var<T> out = make_result<T>(a.shape(), {a.shared()});
  auto& y = out.mutable_value();
  const auto& x = a.value();
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = T(0.5) * x[i] * (T(1) + std::erf(x[i] * T(std::numbers::sqrt2 / 2)));
  }
  if (out.requires_grad()) {
    out.node()->backward_fn = [](Node<T>& self) {
      if (auto* g = grad_of(self, 0)) {
        const auto& x = self.inputs[0]->value;
        const T inv_sqrt_2pi = T(0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
        for (std::size_t i = 0; i < g->size(); ++i) {
          const T cdf = T(0.5) * (T(1) + std::erf(x[i] * T(std::numbers::sqrt2 / 2)));
          const T pdf = inv_sqrt_2pi * std::exp(T(-0.5) * x[i] * x[i]);
          (*g)[i] += self.grad[i] * (cdf + x[i] * pdf);
        }
      }
    };
  }
  return out;
}

template <class T>
Var<T> exp(const Var<T>& a) {
  Var<T> out = make_result<T>(a.shape(), {a.shared()});
  auto& y = out.mutable_value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::exp(a.value()[i]);
  if (out.requires_grad()) {
    out.node()->backward_fn = [](Node<T>& self) {
      if (auto* g = grad_of(self, 0)) {
        for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] += self.grad[i] * self.value[i];
      }
    };
  }
  return out;
}

template <class T>
Var<T> abs(const Var<T>& a) {
  Var<T> out = make_result<T>(a.shape(), {a.shared()});
  auto& y = out.mutable_value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::abs(a.value()[i]);
  if (out.requires_grad()) {
    out.node()->backward_fn = [](Node<T>& self) {
      if (auto* g = grad_of(self, 0)) {
        const auto& x = self.inputs[0]->value;
        for (std::size_t i = 0; i < g->size(); ++i) {
          const T sign = x[i] > T(0) ? T(1) : (x[i] < T(0) ? T(-1) : T(0));
          (*g)[i] += self.grad[i] * sign;
        }
      }
    };
  }
  return out;
}

// ---------------------------------------------------------------------------
// Broadcasting

template <class T>
Var<T> add_rowvec(const Var<T>& a, const Var<T>& row) {
  const auto [m, n] = as2d(a.shape(), "add_rowvec");
  require(static_cast<int>(row.size()) == n, ErrorCode::kShape,
          "add_rowvec: row of " + shape_string(row.shape()) + " for " + shape_string(a.shape()));
  Var<T> out = make_result<T>(a.shape(), {a.shared(), row.shared()});
  as_mat(out.mutable_value(), m, n) =
      as_mat(a.value(), m, n).rowwise() + as_mat(row.value(), 1, n).row(0);
  if (out.requires_grad()) {
    out.node()->backward_fn = [m, n](Node<T>& self) {
      const auto g = as_mat(self.grad, m, n);
      if (auto* ga = grad_of(self, 0)) as_mat(*ga, m, n) += g;
      if (auto* gr = grad_of(self, 1)) as_mat(*gr, 1, n) += g.colwise().sum();
    };
  }
  return out;
}

template <class T>
Var<T> scale_rows(const Var<T>& a, const Var<T>& col) {
  const auto [m, n] = as2d(a.shape(), "scale_rows");
  require(static_cast<int>(col.size()) == m, ErrorCode::kShape,
          "scale_rows: column of " + shape_string(col.shape()) + " for " + shape_string(a.shape()));
  Var<T> out = make_result<T>(a.shape(), {a.shared(), col.shared()});
  auto y = as_mat(out.mutable_value(), m, n);
  const auto x = as_mat(a.value(), m, n);
  for (int i = 0; i < m; ++i) y.row(i) = x.row(i) * col.value()[i];
  if (out.requires_grad()) {
    out.node()->backward_fn = [m, n](Node<T>& self) {
      const auto g = as_mat(self.grad, m, n);
      const auto x = as_mat(self.inputs[0]->value, m, n);
      const auto& c = self.inputs[1]->value;
      if (auto* ga = grad_of(self, 0)) {
        auto gm = as_mat(*ga, m, n);
        for (int i = 0; i < m; ++i) gm.row(i) += g.row(i) * c[i];
      }
      if (auto* gc = grad_of(self, 1)) {
        for (int i = 0; i < m; ++i) (*gc)[i] += g.row(i).dot(x.row(i));
      }
    };
  }
  return out;
}

template <class T>
Var<T> mul_rowvec(const Var<T>& a, const Var<T>& row) {
  const auto [m, n] = as2d(a.shape(), "mul_rowvec");
  require(static_cast<int>(row.size()) == n, ErrorCode::kShape,
          "mul_rowvec: row of " + shape_string(row.shape()) + " for " + shape_string(a.shape()));
  Var<T> out = make_result<T>(a.shape(), {a.shared(), row.shared()});
  const auto r = as_mat(row.value(), 1, n);
  as_mat(out.mutable_value(), m, n) = as_mat(a.value(), m, n).array().rowwise() * r.array().row(0);
  if (out.requires_grad()) {
    out.node()->backward_fn = [m, n](Node<T>& self) {
      const auto g = as_mat(self.grad, m, n);
      const auto x = as_mat(self.inputs[0]->value, m, n);
      const auto r = as_mat(self.inputs[1]->value, 1, n);
      if (auto* ga = grad_of(self, 0)) {
        as_mat(*ga, m, n).array() += g.array().rowwise() * r.array().row(0);
      }
      if (auto* gr = grad_of(self, 1)) {
        as_mat(*gr, 1, n) += (g.array() * x.array()).colwise().sum().matrix();
      }
    };
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reductions

template <class T>
Var<T> sum(const Var<T>& a) {
  Var<T> out = make_result<T>({1}, {a.shared()});
  double acc = 0.0;
  for (T v : a.value()) acc += v;
  out.mutable_value()[0] = static_cast<T>(acc);
  if (out.requires_grad()) {
    out.node()->backward_fn = [](Node<T>& self) {
      if (auto* g = grad_of(self, 0)) {
        for (auto& v : *g) v += self.grad[0];
      }
    };
  }
  return out;
}

template <class T>
Var<T> mean(const Var<T>& a) {
  require(a.size() > 0, ErrorCode::kShape, "mean of an empty tensor");
  return scale(sum(a), T(1) / static_cast<T>(a.size()));
}

// ---------------------------------------------------------------------------
// Structure

template <class T>
Var<T> reshape(const Var<T>& a, Shape shape) {
  require(element_count(shape) == a.size(), ErrorCode::kShape,
          "reshape " + shape_string(a.shape()) + " -> " + shape_string(shape));
  Var<T> out = make_result<T>(std::move(shape), {a.shared()});
  out.mutable_value() = a.value();
  if (out.requires_grad()) {
    out.node()->backward_fn = [](Node<T>& self) {
      if (auto* g = grad_of(self, 0)) {
        for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] += self.grad[i];
      }
    };
  }
  return out;
}

template <class T>
Var<T> concat_cols(const std::vector<Var<T>>& parts) {
  require(!parts.empty(), ErrorCode::kShape, "concat_cols of nothing");
  const int m = as2d(parts[0].shape(), "concat_cols").first;
  std::vector<int> widths;
  std::vector<NodePtr<T>> inputs;
  int total = 0;
  for (const auto& p : parts) {
    const auto [pm, pn] = as2d(p.shape(), "concat_cols");
    require(pm == m, ErrorCode::kShape, "concat_cols: row mismatch " + shape_string(p.shape()));
    widths.push_back(pn);
    inputs.push_back(p.shared());
    total += pn;
  }
  Var<T> out = make_result<T>({m, total}, inputs);
  auto y = as_mat(out.mutable_value(), m, total);
  int off = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    y.middleCols(off, widths[i]) = as_mat(parts[i].value(), m, widths[i]);
    off += widths[i];
  }
  if (out.requires_grad()) {
    out.node()->backward_fn = [m, total, widths](Node<T>& self) {
      const auto g = as_mat(self.grad, m, total);
      int off = 0;
      for (std::size_t i = 0; i < widths.size(); ++i) {
        if (auto* gi = grad_of(self, i)) as_mat(*gi, m, widths[i]) += g.middleCols(off, widths[i]);
        off += widths[i];
      }
    };
  }
  return out;
}

template <class T>
Var<T> concat_rows(const std::vector<Var<T>>& parts) {
  require(!parts.empty(), ErrorCode::kShape, "concat_rows of nothing");
  const int n = as2d(parts[0].shape(), "concat_rows").second;
  std::vector<int> heights;
  std::vector<NodePtr<T>> inputs;
  int total = 0;
  for (const auto& p : parts) {
    const auto [pm, pn] = as2d(p.shape(), "concat_rows");
    require(pn == n, ErrorCode::kShape, "concat_rows: column mismatch " + shape_string(p.shape()));
    heights.push_back(pm);
    inputs.push_back(p.shared());
    total += pm;
  }
  Var<T> out = make_result<T>({total, n}, inputs);
  std::size_t off = 0;
  for (const auto& p : parts) {
    std::copy(p.value().begin(), p.value().end(), out.mutable_value().begin() + off);
    off += p.size();
  }
  if (out.requires_grad()) {
    out.node()->backward_fn = [](Node<T>& self) {
      std::size_t off = 0;
      for (std::size_t i = 0; i < self.inputs.size(); ++i) {
        const std::size_t len = self.inputs[i]->value.size();
        if (auto* gi = grad_of(self, i)) {
          for (std::size_t k = 0; k < len; ++k) (*gi)[k] += self.grad[off + k];
        }
        off += len;
      }
    };
  }
  return out;
}

template <class T>
Var<T> slice_cols(const Var<T>& a, int begin, int count) {
  const auto [m, n] = as2d(a.shape(), "slice_cols");
  require(begin >= 0 && count >= 0 && begin + count <= n, ErrorCode::kShape, "slice_cols out of range");
  Var<T> out = make_result<T>({m, count}, {a.shared()});
  as_mat(out.mutable_value(), m, count) = as_mat(a.value(), m, n).middleCols(begin, count);
  if (out.requires_grad()) {
    out.node()->backward_fn = [m, n, begin, count](Node<T>& self) {
      if (auto* g = grad_of(self, 0)) {
        as_mat(*g, m, n).middleCols(begin, count) += as_mat(self.grad, m, count);
      }
    };
  }
  return out;
}

template <class T>
Var<T> slice_rows(const Var<T>& a, int begin, int count) {
  const auto [m, n] = as2d(a.shape(), "slice_rows");
  require(begin >= 0 && count >= 0 && begin + count <= m, ErrorCode::kShape, "slice_rows out of range");
  Var<T> out = make_result<T>({count, n}, {a.shared()});
  std::copy(a.value().begin() + static_cast<std::size_t>(begin) * n,
            a.value().begin() + static_cast<std::size_t>(begin + count) * n,
            out.mutable_value().begin());
  if (out.requires_grad()) {
    out.node()->backward_fn = [n, begin](Node<T>& self) {
      if (auto* g = grad_of(self, 0)) {
        const std::size_t off = static_cast<std::size_t>(begin) * n;
        for (std::size_t k = 0; k < self.grad.size(); ++k) (*g)[off + k] += self.grad[k];
      }
    };
  }
  return out;
}

// ---------------------------------------------------------------------------
// Neural network ops

template <class T>
Var<T> layer_norm_rows(const Var<T>& a, const Var<T>& gamma, const Var<T>& beta, T eps) {
  const auto [m, n] = as2d(a.shape(), "layer_norm_rows");
  require(static_cast<int>(gamma.size()) == n && static_cast<int>(beta.size()) == n,
          ErrorCode::kShape, "layer_norm_rows: affine size mismatch");
  Var<T> out = make_result<T>(a.shape(), {a.shared(), gamma.shared(), beta.shared()});
  auto normalized = std::make_shared<std::vector<T>>(a.size());
  auto inv_std = std::make_shared<std::vector<T>>(m);
  const auto& x = a.value();
  auto& y = out.mutable_value();
  for (int i = 0; i < m; ++i) {
    const T* row = x.data() + static_cast<std::size_t>(i) * n;
    double mu = 0.0;
    for (int j = 0; j < n; ++j) mu += row[j];
    mu /= n;
    double var = 0.0;
    for (int j = 0; j < n; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= n;
    const T is = static_cast<T>(1.0 / std::sqrt(var + eps));
    (*inv_std)[i] = is;
    for (int j = 0; j < n; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * n + j;
      (*normalized)[k] = static_cast<T>((row[j] - mu) * is);
      y[k] = gamma.value()[j] * (*normalized)[k] + beta.value()[j];
    }
  }
  if (out.requires_grad()) {
    out.node()->backward_fn = [m, n, normalized, inv_std](Node<T>& self) {
      const auto& gam = self.inputs[1]->value;
      auto* gx = grad_of(self, 0);
      auto* gg = grad_of(self, 1);
      auto* gb = grad_of(self, 2);
      std::vector<T> dxhat(n);
      for (int i = 0; i < m; ++i) {
        double mean_d = 0.0, mean_dx = 0.0;
        for (int j = 0; j < n; ++j) {
          const std::size_t k = static_cast<std::size_t>(i) * n + j;
          const T g = self.grad[k];
          if (gg) (*gg)[j] += g * (*normalized)[k];
          if (gb) (*gb)[j] += g;
          dxhat[j] = g * gam[j];
          mean_d += dxhat[j];
          mean_dx += dxhat[j] * (*normalized)[k];
        }
        if (!gx) continue;
        mean_d /= n;
        mean_dx /= n;
        for (int j = 0; j < n; ++j) {
          const std::size_t k = static_cast<std::size_t>(i) * n + j;
          (*gx)[k] += static_cast<T>((*inv_std)[i] *
                                     (dxhat[j] - mean_d - (*normalized)[k] * mean_dx));
        }
      }
    };
  }
  return out;
}

template <class T>
Var<T> softmax_rows(const Var<T>& a) {
  const auto [m, n] = as2d(a.shape(), "softmax_rows");
  Var<T> out = make_result<T>(a.shape(), {a.shared()});
  const auto& x = a.value();
  auto& y = out.mutable_value();
  for (int i = 0; i < m; ++i) {
    const std::size_t base = static_cast<std::size_t>(i) * n;
    T mx = x[base];
    for (int j = 1; j < n; ++j) mx = std::max(mx, x[base + j]);
    double z = 0.0;
    for (int j = 0; j < n; ++j) {
      y[base + j] = std::exp(x[base + j] - mx);
      z += y[base + j];
    }
    for (int j = 0; j < n; ++j) y[base + j] = static_cast<T>(y[base + j] / z);
  }
  if (out.requires_grad()) {
    out.node()->backward_fn = [m, n](Node<T>& self) {
      auto* g = grad_of(self, 0);
      if (!g) return;
      for (int i = 0; i < m; ++i) {
        const std::size_t base = static_cast<std::size_t>(i) * n;
        double dot = 0.0;
        for (int j = 0; j < n; ++j) dot += self.grad[base + j] * self.value[base + j];
        for (int j = 0; j < n; ++j) {
          (*g)[base + j] += static_cast<T>(self.value[base + j] * (self.grad[base + j] - dot));
        }
      }
    };
  }
  return out;
}

template <class T>
Var<T> conv2d(const Var<T>& x, const Var<T>& w, const Var<T>& b, int stride, int pad) {
  require(x.rank() == 3 && w.rank() == 4, ErrorCode::kShape,
          "conv2d: expected x [C,H,W] and w [O,C,kh,kw], got " + shape_string(x.shape()) + ", " +
              shape_string(w.shape()));
  const int c = x.dim(0), h = x.dim(1), wd = x.dim(2);
  const int o = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  require(w.dim(1) == c, ErrorCode::kShape, "conv2d: channel mismatch");
  require(static_cast<int>(b.size()) == o, ErrorCode::kShape, "conv2d: bias size mismatch");
  require(stride >= 1 && pad >= 0, ErrorCode::kShape, "conv2d: bad stride/pad");
  const int ho = (h + 2 * pad - kh) / stride + 1;
  const int wo = (wd + 2 * pad - kw) / stride + 1;
  require(ho > 0 && wo > 0, ErrorCode::kShape, "conv2d: output would be empty");
  const int patch = c * kh * kw;
  const int pixels = ho * wo;

  // im2col: [patch, pixels]
  auto cols = std::make_shared<std::vector<T>>(static_cast<std::size_t>(patch) * pixels, T(0));
  const auto& xv = x.value();
  for (int ci = 0; ci < c; ++ci) {
    for (int a = 0; a < kh; ++a) {
      for (int bb = 0; bb < kw; ++bb) {
        const int row = (ci * kh + a) * kw + bb;
        T* dst = cols->data() + static_cast<std::size_t>(row) * pixels;
        for (int oy = 0; oy < ho; ++oy) {
          const int iy = oy * stride - pad + a;
          if (iy < 0 || iy >= h) continue;
          const T* src = xv.data() + (static_cast<std::size_t>(ci) * h + iy) * wd;
          for (int ox = 0; ox < wo; ++ox) {
            const int ix = ox * stride - pad + bb;
            if (ix >= 0 && ix < wd) dst[oy * wo + ox] = src[ix];
          }
        }
      }
    }
  }
  Var<T> out = make_result<T>({o, ho, wo}, {x.shared(), w.shared(), b.shared()});
  auto y = as_mat(out.mutable_value(), o, pixels);
  y.noalias() = as_mat(w.value(), o, patch) * as_mat(*cols, patch, pixels);
  y.colwise() += Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>>(b.value().data(), o);

  if (out.requires_grad()) {
    out.node()->backward_fn = [=](Node<T>& self) {
      const auto g = as_mat(self.grad, o, pixels);
      if (auto* gw = grad_of(self, 1)) {
        as_mat(*gw, o, patch).noalias() += g * as_mat(*cols, patch, pixels).transpose();
      }
      if (auto* gb = grad_of(self, 2)) {
        Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>>(gb->data(), o) += g.rowwise().sum();
      }
      if (auto* gx = grad_of(self, 0)) {
        RowMat<T> dcols = as_mat(self.inputs[1]->value, o, patch).transpose() * g;
        for (int ci = 0; ci < c; ++ci) {
          for (int a = 0; a < kh; ++a) {
            for (int bb = 0; bb < kw; ++bb) {
              const int row = (ci * kh + a) * kw + bb;
              for (int oy = 0; oy < ho; ++oy) {
                const int iy = oy * stride - pad + a;
                if (iy < 0 || iy >= h) continue;
                T* dst = gx->data() + (static_cast<std::size_t>(ci) * h + iy) * wd;
                for (int ox = 0; ox < wo; ++ox) {
                  const int ix = ox * stride - pad + bb;
                  if (ix >= 0 && ix < wd) dst[ix] += dcols(row, oy * wo + ox);
                }
              }
            }
          }
        }
      }
    };
  }
  return out;
}

template <class T>
Var<T> mean_spatial(const Var<T>& x) {
  require(x.rank() == 3, ErrorCode::kShape, "mean_spatial: expected [C,H,W]");
  const int c = x.dim(0);
  const int pixels = x.dim(1) * x.dim(2);
  Var<T> out = make_result<T>({1, c}, {x.shared()});
  out.mutable_value() = std::vector<T>(c);
  const auto xm = as_mat(x.value(), c, pixels);
  for (int i = 0; i < c; ++i) out.mutable_value()[i] = xm.row(i).sum() / static_cast<T>(pixels);
  if (out.requires_grad()) {
    out.node()->backward_fn = [c, pixels](Node<T>& self) {
      if (auto* g = grad_of(self, 0)) {
        auto gm = as_mat(*g, c, pixels);
        for (int i = 0; i < c; ++i) gm.row(i).array() += self.grad[i] / static_cast<T>(pixels);
      }
    };
  }
  return out;
}

template <class T>
Var<T> edc_db_rows(const Var<T>& a, T floor) {
  const auto [m, n] = as2d(a.shape(), "edc_db_rows");
  Var<T> out = make_result<T>(a.shape(), {a.shared()});
  auto cum = std::make_shared<std::vector<double>>(a.size());
  const double c = 10.0 / std::numbers::ln10;
  const auto& x = a.value();
  auto& y = out.mutable_value();
  for (int i = 0; i < m; ++i) {
    const std::size_t base = static_cast<std::size_t>(i) * n;
    double tail = 0.0;
    for (int t = n; t-- > 0;) {
      tail += std::exp(2.0 * static_cast<double>(x[base + t])) + static_cast<double>(floor);
      (*cum)[base + t] = tail;
    }
    const double log_total = std::log((*cum)[base]);
    for (int t = 0; t < n; ++t) y[base + t] = static_cast<T>(c * (std::log((*cum)[base + t]) - log_total));
  }
  if (out.requires_grad()) {
    out.node()->backward_fn = [m, n, cum, c](Node<T>& self) {
      auto* g = grad_of(self, 0);
      if (!g) return;
      const auto& x = self.inputs[0]->value;
      for (int i = 0; i < m; ++i) {
        const std::size_t base = static_cast<std::size_t>(i) * n;
        double total_g = 0.0;
        for (int t = 0; t < n; ++t) total_g += self.grad[base + t];
        const double head = total_g / (*cum)[base];
        double prefix = 0.0;
        for (int t = 0; t < n; ++t) {
          prefix += self.grad[base + t] / (*cum)[base + t];
          const double de = c * (prefix - head);
          (*g)[base + t] += static_cast<T>(de * 2.0 * std::exp(2.0 * static_cast<double>(x[base + t])));
        }
      }
    };
  }
  return out;
}

// ---------------------------------------------------------------------------
// Instantiations

#define ROOMECHO_AD_INSTANTIATE(T)                                                        \
  template class Var<T>;                                                                  \
  template void backward<T>(const Var<T>&);                                               \
  template Var<T> matmul<T>(const Var<T>&, const Var<T>&);                                \
  template Var<T> matmul_nt<T>(const Var<T>&, const Var<T>&);                             \
  template Var<T> transpose<T>(const Var<T>&);                                            \
  template Var<T> add<T>(const Var<T>&, const Var<T>&);                                   \
  template Var<T> sub<T>(const Var<T>&, const Var<T>&);                                   \
  template Var<T> mul<T>(const Var<T>&, const Var<T>&);                                   \
  template Var<T> scale<T>(const Var<T>&, T);                                             \
  template Var<T> gelu<T>(const Var<T>&);                                                 \
  template Var<T> exp<T>(const Var<T>&);                                                  \
  template Var<T> abs<T>(const Var<T>&);                                                  \
  template Var<T> add_rowvec<T>(const Var<T>&, const Var<T>&);                            \
  template Var<T> scale_rows<T>(const Var<T>&, const Var<T>&);                            \
  template Var<T> mul_rowvec<T>(const Var<T>&, const Var<T>&);                            \
  template Var<T> sum<T>(const Var<T>&);                                                  \
  template Var<T> mean<T>(const Var<T>&);                                                 \
  template Var<T> reshape<T>(const Var<T>&, Shape);                                       \
  template Var<T> concat_cols<T>(const std::vector<Var<T>>&);                             \
  template Var<T> concat_rows<T>(const std::vector<Var<T>>&);                             \
  template Var<T> slice_cols<T>(const Var<T>&, int, int);                                 \
  template Var<T> slice_rows<T>(const Var<T>&, int, int);                                 \
  template Var<T> layer_norm_rows<T>(const Var<T>&, const Var<T>&, const Var<T>&, T);     \
  template Var<T> softmax_rows<T>(const Var<T>&);                                         \
  template Var<T> conv2d<T>(const Var<T>&, const Var<T>&, const Var<T>&, int, int);       \
  template Var<T> mean_spatial<T>(const Var<T>&);                                         \
  template Var<T> edc_db_rows<T>(const Var<T>&, T);

ROOMECHO_AD_INSTANTIATE(float)
ROOMECHO_AD_INSTANTIATE(double)

#undef ROOMECHO_AD_INSTANTIATE

}  // namespace roomecho::ad
