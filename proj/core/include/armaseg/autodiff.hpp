// Copyright 2026 The armaseg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Dense 2-D tensors with tape-based reverse-mode differentiation.
//
// A Tape records every forward operation together with a backward rule.
// Tensors are cheap handles into the tape that owns their value and
// gradient; they stay valid for the lifetime of the tape. A tape is meant to
// be rebuilt for each optimization step and is not thread-safe.

#include <cstddef>
#include <deque>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace armaseg::ad {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

struct Shape {
  Index rows = 0;
  Index cols = 0;
  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(Shape s);

class Tape;

/// Handle to a value recorded on a Tape.
class Tensor {
 public:
  Tensor() = default;

  const Matrix& value() const;
  /// Gradient of the last backward() loss. Throws StateError before
  /// backward() has run or if this tensor does not require a gradient.
  const Matrix& grad() const;
  Shape shape() const;
  Index rows() const { return shape().rows; }
  Index cols() const { return shape().cols; }
  bool requires_grad() const;
  /// Scalar value of a 1x1 tensor.
  double item() const;

  bool valid() const { return tape_ != nullptr; }
  Tape& tape() const;
  std::size_t id() const { return id_; }

 private:
  friend class Tape;
  Tensor(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

class Tape {
 public:
  /// Backward rule of one recorded operation. `out_grad` is dL/d(output);
  /// `in_grads[i]` is the accumulator of input i, or nullptr when that input
  /// does not require a gradient. Rules must accumulate (+=), not assign.
  using BackwardFn = std::function<void(const Matrix& out_grad,
                                        const std::vector<Matrix*>& in_grads)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Tensor leaf(Matrix value, bool requires_grad);
  Tensor constant(Matrix value) { return leaf(std::move(value), false); }
  Tensor parameter(Matrix value) { return leaf(std::move(value), true); }

  /// Records an operation. `inputs` must belong to this tape.
  Tensor record(Matrix value, std::vector<Tensor> inputs, BackwardFn backward);

  /// Propagates d(loss)/d(.) to every tensor that requires a gradient.
  /// Requires a finite 1x1 loss. A second call without zero_grad() in
  /// between throws StateError.
  void backward(const Tensor& loss);
  /// Clears all gradients so that backward() may run again.
  void zero_grad();
  bool has_gradients() const { return backward_done_; }

  std::size_t size() const { return nodes_.size(); }
  /// Value of the node with the given id; an op's own output is node
  /// size() at the time it calls record().
  const Matrix& value_at(std::size_t id) const { return nodes_.at(id).value; }

 private:
  friend class Tensor;

  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
  };

  const Node& node(std::size_t id) const { return nodes_[id]; }
  void check_owned(const Tensor& t) const;

  // deque keeps node addresses stable while the tape grows.
  std::deque<Node> nodes_;
  bool backward_done_ = false;
};

// ---------------------------------------------------------------------------
// Operations. All inputs must live on the same tape.

/// a[m x p] * b[p x q].
Tensor matmul(const Tensor& a, const Tensor& b);

Tensor add(const Tensor& a, const Tensor& b);
/// x[n x h] + bias[1 x h] broadcast over rows.
Tensor add_row_vector(const Tensor& x, const Tensor& bias);
Tensor scale(const Tensor& a, double factor);
Tensor add_scalar(const Tensor& a, double value);
/// Elementwise mean of tensors with identical shapes.
Tensor mean(const std::vector<Tensor>& terms);

/// Sum of all entries as a 1x1 tensor.
Tensor sum(const Tensor& a);
/// Column sums as a 1 x cols tensor.
Tensor column_sum(const Tensor& a);

enum class Activation { kReLU, kGELU, kSiLU, kSeLU };

inline constexpr double kSeluAlpha = 1.6732632423543772848170429916717;
inline constexpr double kSeluLambda = 1.0507009873554804934193349852946;

/// Accepts "relu", "gelu", "silu", "selu" (case-insensitive).
Activation parse_activation(std::string_view name);
std::string_view to_string(Activation kind);

double activate(Activation kind, double x);
double activate_derivative(Activation kind, double x);

/// Elementwise activation; non-finite input throws NonFiniteError.
Tensor activation(const Tensor& x, Activation kind);

/// Softmax over each row (numerically stable).
Tensor row_softmax(const Tensor& x);

/// Tr(c^T b c) for symmetric b. Differentiable in c only; `b` is held by
/// reference and must outlive the tape's backward pass.
Tensor trace_quadratic(const Tensor& c, const Matrix& b);
/// Same, with b on the tape; differentiable in both arguments.
Tensor trace_quadratic(const Tensor& c, const Tensor& b);

}  // namespace armaseg::ad
