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

#include "armaseg/autodiff.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "armaseg/errors.hpp"

namespace armaseg::ad {

std::string to_string(Shape s) {
  std::ostringstream os;
  os << "[" << s.rows << "x" << s.cols << "]";
  return os.str();
}

// ---------------------------------------------------------------------------
// Tensor

Tape& Tensor::tape() const {
  if (tape_ == nullptr) throw StateError("tensor is not attached to a tape");
  return *tape_;
}

const Matrix& Tensor::value() const { return tape().node(id_).value; }

const Matrix& Tensor::grad() const {
  const Tape& t = tape();
  if (!t.backward_done_) throw StateError("grad() requested before backward()");
  const auto& n = t.node(id_);
  if (!n.requires_grad) throw StateError("tensor does not require a gradient");
  return n.grad;
}

Shape Tensor::shape() const {
  const Matrix& v = value();
  return {v.rows(), v.cols()};
}

bool Tensor::requires_grad() const { return tape().node(id_).requires_grad; }

double Tensor::item() const {
  const Matrix& v = value();
  if (v.rows() != 1 || v.cols() != 1) {
    throw ShapeError("item() on non-scalar tensor " + to_string(shape()));
  }
  return v(0, 0);
}

// ---------------------------------------------------------------------------
// Tape

void Tape::check_owned(const Tensor& t) const {
  if (t.tape_ != this) throw ContractError("tensor belongs to a different tape");
}

Tensor Tape::leaf(Matrix value, bool requires_grad) {
  if (backward_done_) throw StateError("cannot record after backward()");
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  nodes_.push_back(std::move(n));
  return Tensor(this, nodes_.size() - 1);
}

Tensor Tape::record(Matrix value, std::vector<Tensor> inputs,
                    BackwardFn backward) {
  if (backward_done_) throw StateError("cannot record after backward()");
  Node n;
  n.value = std::move(value);
  n.inputs.reserve(inputs.size());
  for (const Tensor& in : inputs) {
    check_owned(in);
    n.inputs.push_back(in.id_);
    n.requires_grad = n.requires_grad || nodes_[in.id_].requires_grad;
  }
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Tensor(this, nodes_.size() - 1);
}

void Tape::backward(const Tensor& loss) {
  check_owned(loss);
  if (backward_done_) {
    throw StateError("backward() called twice without zero_grad()");
  }
  const Matrix& lv = nodes_[loss.id_].value;
  if (lv.rows() != 1 || lv.cols() != 1) {
    throw ContractError("backward() needs a scalar loss, got " +
                        to_string({lv.rows(), lv.cols()}));
  }
  if (!std::isfinite(lv(0, 0))) throw NonFiniteError("loss is not finite");

  for (Node& n : nodes_) {
    if (n.requires_grad) n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
  }
  backward_done_ = true;

  Node& root = nodes_[loss.id_];
  if (!root.requires_grad) return;
  root.grad(0, 0) = 1.0;

  std::vector<char> reached(nodes_.size(), 0);
  reached[loss.id_] = 1;
  std::vector<Matrix*> in_grads;
  for (std::size_t id = loss.id_ + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!reached[id] || !n.backward) continue;
    in_grads.clear();
    for (std::size_t in : n.inputs) {
      Node& src = nodes_[in];
      in_grads.push_back(src.requires_grad ? &src.grad : nullptr);
      if (src.requires_grad) reached[in] = 1;
    }
    n.backward(n.grad, in_grads);
  }
}

void Tape::zero_grad() {
  for (Node& n : nodes_) n.grad.resize(0, 0);
  backward_done_ = false;
}

// ---------------------------------------------------------------------------
// Operations

namespace {

void require_same_tape(const Tensor& a, const Tensor& b) {
  if (&a.tape() != &b.tape()) {
    throw ContractError("operands live on different tapes");
  }
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " +
                     to_string(a.shape()) + " vs " + to_string(b.shape()));
  }
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_same_tape(a, b);
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions differ " + to_string(a.shape()) +
                     " x " + to_string(b.shape()));
  }
  Matrix out = a.value() * b.value();
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  return a.tape().record(
      std::move(out), {a, b},
      [&av, &bv](const Matrix& g, const std::vector<Matrix*>& in) {
        if (in[0]) in[0]->noalias() += g * bv.transpose();
        if (in[1]) in[1]->noalias() += av.transpose() * g;
      });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_tape(a, b);
  require_same_shape("add", a, b);
  return a.tape().record(a.value() + b.value(), {a, b},
                         [](const Matrix& g, const std::vector<Matrix*>& in) {
                           if (in[0]) *in[0] += g;
                           if (in[1]) *in[1] += g;
                         });
}

Tensor add_row_vector(const Tensor& x, const Tensor& bias) {
  require_same_tape(x, bias);
  if (bias.rows() != 1 || bias.cols() != x.cols()) {
    throw ShapeError("add_row_vector: bias " + to_string(bias.shape()) +
                     " does not match " + to_string(x.shape()));
  }
  Matrix out = x.value().rowwise() + bias.value().row(0);
  return x.tape().record(
      std::move(out), {x, bias},
      [](const Matrix& g, const std::vector<Matrix*>& in) {
        if (in[0]) *in[0] += g;
        if (in[1]) *in[1] += g.colwise().sum();
      });
}

Tensor scale(const Tensor& a, double factor) {
  return a.tape().record(
      a.value() * factor, {a},
      [factor](const Matrix& g, const std::vector<Matrix*>& in) {
        if (in[0]) *in[0] += factor * g;
      });
}

Tensor add_scalar(const Tensor& a, double value) {
  Matrix out = a.value().array() + value;
  return a.tape().record(std::move(out), {a},
                         [](const Matrix& g, const std::vector<Matrix*>& in) {
                           if (in[0]) *in[0] += g;
                         });
}

Tensor mean(const std::vector<Tensor>& terms) {
  if (terms.empty()) throw ContractError("mean of zero tensors");
  Matrix acc = terms.front().value();
  for (std::size_t i = 1; i < terms.size(); ++i) {
    require_same_tape(terms.front(), terms[i]);
    require_same_shape("mean", terms.front(), terms[i]);
    acc += terms[i].value();
  }
  const double w = 1.0 / static_cast<double>(terms.size());
  acc *= w;
  return terms.front().tape().record(
      std::move(acc), terms,
      [w](const Matrix& g, const std::vector<Matrix*>& in) {
        for (Matrix* gi : in) {
          if (gi) *gi += w * g;
        }
      });
}

Tensor sum(const Tensor& a) {
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return a.tape().record(std::move(out), {a},
                         [](const Matrix& g, const std::vector<Matrix*>& in) {
                           if (in[0]) in[0]->array() += g(0, 0);
                         });
}

Tensor column_sum(const Tensor& a) {
  Matrix out = a.value().colwise().sum();
  return a.tape().record(std::move(out), {a},
                         [](const Matrix& g, const std::vector<Matrix*>& in) {
                           if (in[0]) in[0]->rowwise() += g.row(0);
                         });
}

// ---------------------------------------------------------------------------
// Activations

Activation parse_activation(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "relu") return Activation::kReLU;
  if (lower == "gelu") return Activation::kGELU;
  if (lower == "silu" || lower == "swish") return Activation::kSiLU;
  if (lower == "selu") return Activation::kSeLU;
  throw ConfigError("unknown activation '" + std::string(name) +
                    "' (expected relu, gelu, silu or selu)");
}

std::string_view to_string(Activation kind) {
  switch (kind) {
    case Activation::kReLU: return "relu";
    case Activation::kGELU: return "gelu";
    case Activation::kSiLU: return "silu";
    case Activation::kSeLU: return "selu";
  }
  return "unknown";
}

namespace {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

}  // namespace

double activate(Activation kind, double x) {
  switch (kind) {
    case Activation::kReLU:
      return x > 0 ? x : 0.0;
    case Activation::kGELU:
      return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2));
    case Activation::kSiLU:
      return x * sigmoid(x);
    case Activation::kSeLU:
      return x > 0 ? kSeluLambda * x : kSeluLambda * kSeluAlpha * std::expm1(x);
  }
  return x;
}

double activate_derivative(Activation kind, double x) {
  switch (kind) {
    case Activation::kReLU:
      return x > 0 ? 1.0 : 0.0;
    case Activation::kGELU: {
      const double cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
      const double pdf =
          std::exp(-0.5 * x * x) * (std::numbers::inv_sqrtpi * kInvSqrt2);
      return cdf + x * pdf;
    }
    case Activation::kSiLU: {
      const double s = sigmoid(x);
      return s * (1.0 + x * (1.0 - s));
    }
    case Activation::kSeLU:
      return x > 0 ? kSeluLambda : kSeluLambda * kSeluAlpha * std::exp(x);
  }
  return 1.0;
}

Tensor activation(const Tensor& x, Activation kind) {
  const Matrix& xv = x.value();
  if (!xv.allFinite()) throw NonFiniteError("activation input is not finite");
  Matrix out = xv.unaryExpr([kind](double v) { return activate(kind, v); });
  return x.tape().record(
      std::move(out), {x},
      [&xv, kind](const Matrix& g, const std::vector<Matrix*>& in) {
        if (!in[0]) return;
        in[0]->array() +=
            g.array() *
            xv.unaryExpr([kind](double v) { return activate_derivative(kind, v); })
                .array();
      });
}

Tensor row_softmax(const Tensor& x) {
  const Matrix& xv = x.value();
  Matrix out(xv.rows(), xv.cols());
  for (Index i = 0; i < xv.rows(); ++i) {
    const double mx = xv.row(i).maxCoeff();
    out.row(i) = (xv.row(i).array() - mx).exp();
    out.row(i) /= out.row(i).sum();
  }
  Tape& tape = x.tape();
  const std::size_t out_id = tape.size();
  return tape.record(
      std::move(out), {x},
      [&tape, out_id](const Matrix& g, const std::vector<Matrix*>& in) {
        if (!in[0]) return;
        const Matrix& yv = tape.value_at(out_id);
        // dx_ij = y_ij * (g_ij - sum_k g_ik y_ik)
        const Eigen::VectorXd dots = (g.array() * yv.array()).rowwise().sum();
        in[0]->array() += yv.array() * (g.colwise() - dots).array();
      });
}

namespace {

void require_symmetric(const Matrix& b) {
  if (b.rows() != b.cols()) {
    throw ShapeError("trace_quadratic: b must be square, got " +
                     to_string({b.rows(), b.cols()}));
  }
  for (Index i = 0; i < b.rows(); ++i) {
    for (Index j = i + 1; j < b.cols(); ++j) {
      if (std::abs(b(i, j) - b(j, i)) > 1e-12) {
        throw ContractError("trace_quadratic: b is not symmetric");
      }
    }
  }
}

}  // namespace

Tensor trace_quadratic(const Tensor& c, const Matrix& b) {
  require_symmetric(b);
  const Matrix& cv = c.value();
  if (b.cols() != cv.rows()) {
    throw ShapeError("trace_quadratic: c " + to_string(c.shape()) +
                     " does not match b " + to_string({b.rows(), b.cols()}));
  }
  Matrix bc = b * cv;
  Matrix out(1, 1);
  out(0, 0) = (cv.array() * bc.array()).sum();
  return c.tape().record(
      std::move(out), {c},
      [bc = std::move(bc)](const Matrix& g, const std::vector<Matrix*>& in) {
        // d/dc Tr(c^T b c) = (b + b^T) c = 2 b c for symmetric b.
        if (in[0]) *in[0] += (2.0 * g(0, 0)) * bc;
      });
}

Tensor trace_quadratic(const Tensor& c, const Tensor& b) {
  require_same_tape(c, b);
  const Matrix& bv = b.value();
  require_symmetric(bv);
  const Matrix& cv = c.value();
  if (bv.cols() != cv.rows()) {
    throw ShapeError("trace_quadratic: c " + to_string(c.shape()) +
                     " does not match b " + to_string(b.shape()));
  }
  Matrix bc = bv * cv;
  Matrix out(1, 1);
  out(0, 0) = (cv.array() * bc.array()).sum();
  return c.tape().record(
      std::move(out), {c, b},
      [&cv, bc = std::move(bc)](const Matrix& g,
                                const std::vector<Matrix*>& in) {
        if (in[0]) *in[0] += (2.0 * g(0, 0)) * bc;
        if (in[1]) in[1]->noalias() += g(0, 0) * (cv * cv.transpose());
      });
}

}  // namespace armaseg::ad
