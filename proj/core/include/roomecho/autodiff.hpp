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

#pragma once

// Minimal tape-free reverse-mode differentiation over dense row-major
// tensors. Every op returns a fresh node holding its inputs and a closure
// that scatters the output gradient back; backward() walks the graph in
// reverse topological order. Instantiated for float and double.

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace roomecho::ad {

using Shape = std::vector<int>;

std::size_t element_count(const Shape& shape);
std::string shape_string(const Shape& shape);

template <class T>
struct Node {
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward_fn;

  void ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), T(0));
  }
};

template <class T>
class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node<T>> node) : node_(std::move(node)) {}

  static Var constant(Shape shape, std::vector<T> values);
  static Var parameter(Shape shape, std::vector<T> values);
  static Var zeros(Shape shape);

  explicit operator bool() const { return static_cast<bool>(node_); }
  const Shape& shape() const { return node_->shape; }
  int dim(int i) const { return node_->shape.at(i); }
  int rank() const { return static_cast<int>(node_->shape.size()); }
  std::size_t size() const { return node_->value.size(); }
  const std::vector<T>& value() const { return node_->value; }
  std::vector<T>& mutable_value() { return node_->value; }
  const std::vector<T>& grad() const { return node_->grad; }
  std::vector<T>& mutable_grad() { return node_->grad; }
  bool requires_grad() const { return node_->requires_grad; }
  T item() const;
  void zero_grad() { node_->grad.assign(node_->value.size(), T(0)); }
  Node<T>* node() const { return node_.get(); }
  const std::shared_ptr<Node<T>>& shared() const { return node_; }

 private:
  std::shared_ptr<Node<T>> node_;
};

// Seeds d(root)/d(root) = 1 and accumulates into every reachable node that
// requires a gradient. Parameter gradients accumulate across calls.
template <class T>
void backward(const Var<T>& root);

// --- linear algebra (rank-2 unless stated) ---
template <class T> Var<T> matmul(const Var<T>& a, const Var<T>& b);      // [m,k]x[k,n]
template <class T> Var<T> matmul_nt(const Var<T>& a, const Var<T>& b);   // [m,k]x[n,k]^T
template <class T> Var<T> transpose(const Var<T>& a);

// --- elementwise ---
template <class T> Var<T> add(const Var<T>& a, const Var<T>& b);
template <class T> Var<T> sub(const Var<T>& a, const Var<T>& b);
template <class T> Var<T> mul(const Var<T>& a, const Var<T>& b);
template <class T> Var<T> scale(const Var<T>& a, T s);
template <class T> Var<T> gelu(const Var<T>& a);
template <class T> Var<T> exp(const Var<T>& a);
template <class T> Var<T> abs(const Var<T>& a);

// --- broadcasting ---
template <class T> Var<T> add_rowvec(const Var<T>& a, const Var<T>& row);   // [m,n] + [n]
template <class T> Var<T> scale_rows(const Var<T>& a, const Var<T>& col);   // [m,n] * [m,1]
template <class T> Var<T> mul_rowvec(const Var<T>& a, const Var<T>& row);   // [m,n] * [1,n]

// --- reductions ---
template <class T> Var<T> sum(const Var<T>& a);
template <class T> Var<T> mean(const Var<T>& a);

// --- structure ---
template <class T> Var<T> reshape(const Var<T>& a, Shape shape);
template <class T> Var<T> concat_cols(const std::vector<Var<T>>& parts);
template <class T> Var<T> concat_rows(const std::vector<Var<T>>& parts);
template <class T> Var<T> slice_cols(const Var<T>& a, int begin, int count);
template <class T> Var<T> slice_rows(const Var<T>& a, int begin, int count);

// --- neural network ---
template <class T> Var<T> layer_norm_rows(const Var<T>& a, const Var<T>& gamma, const Var<T>& beta,
                                          T eps = T(1e-5));
template <class T> Var<T> softmax_rows(const Var<T>& a);
// x [C,H,W], w [O,C,kh,kw], b [O] -> [O,Ho,Wo]
template <class T> Var<T> conv2d(const Var<T>& x, const Var<T>& w, const Var<T>& b, int stride,
                                 int pad);
// x [C,H,W] -> [1,C]
template <class T> Var<T> mean_spatial(const Var<T>& x);

// Per-row backward-integrated energy of exp(2 a) in dB re the row total.
// `floor` is added to every energy term to keep the logarithm finite.
template <class T> Var<T> edc_db_rows(const Var<T>& a, T floor = T(1e-30));

}  // namespace roomecho::ad
