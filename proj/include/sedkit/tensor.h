/*
 * Copyright 2026 The sedkit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Dense float64 tensors with a dynamic reverse-mode gradient tape.
//
// A Tensor is an immutable value (shape + shared data buffer). Tensors created
// through Tape::variable(), or produced by an op with at least one such input,
// carry a link to a node on that tape. backward() walks the tape in reverse
// recording order, which is a valid reverse topological order because every
// node is appended after its inputs.
//
// Tape policy: backward() zeroes all accumulators before propagating, so it can
// be called repeatedly on the same tape (e.g. for different roots). clear()
// drops every node; tensors linked to the cleared tape become stale and any op
// on them throws. A Tape must outlive the tensors recorded on it.
//
// Broadcasting: binary elementwise ops accept equal shapes, or one operand of
// size 1 (a scalar). Nothing else broadcasts.

#ifndef SEDKIT_TENSOR_H_
#define SEDKIT_TENSOR_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sedkit {

using Shape = std::vector<std::size_t>;

std::size_t ShapeSize(const Shape& shape);
std::string ShapeToString(const Shape& shape);

class Tape;

class Tensor {
 public:
  // Scalar zero.
  Tensor();
  Tensor(Shape shape, std::vector<double> data);

  static Tensor Scalar(double value);
  static Tensor Vector(std::vector<double> values);
  static Tensor Full(Shape shape, double value);
  static Tensor Zeros(Shape shape) { return Full(std::move(shape), 0.0); }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_->size(); }
  std::span<const double> data() const { return *data_; }
  const std::vector<double>& values() const { return *data_; }
  double operator[](std::size_t i) const { return (*data_)[i]; }
  // Value of a size-1 tensor.
  double item() const;

  bool on_tape() const { return tape_ != nullptr; }
  Tape* tape() const { return tape_; }
  std::size_t node() const { return node_; }

  // Same values, no tape linkage.
  Tensor detach() const { return Tensor(shape_, data_); }

 private:
  friend class Tape;
  Tensor(Shape shape, std::shared_ptr<const std::vector<double>> data)
      : shape_(std::move(shape)), data_(std::move(data)) {}

  Shape shape_;
  std::shared_ptr<const std::vector<double>> data_;
  Tape* tape_ = nullptr;
  std::size_t node_ = 0;
  std::size_t generation_ = 0;
};

// Receives the gradient of the node output and a pointer per op input to that
// input's gradient accumulator (nullptr when the input is not on the tape).
using BackwardFn = std::function<void(std::span<const double> out_grad,
                                      std::span<std::vector<double>* const> in_grads)>;

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Registers a leaf and returns a tape-linked copy of `value`.
  Tensor variable(const Tensor& value);

  // Records an op output. `inputs` are the op operands in the order the
  // backward function expects; only tape-linked ones get accumulators.
  Tensor record(Shape shape, std::vector<double> data, std::span<const Tensor> inputs,
                BackwardFn backward);

  // Seeds d(root)/d(root) = 1 and propagates to every node. Throws if root is
  // not a size-1 tensor on this tape.
  void backward(const Tensor& root);

  // Gradient of the last backward() root with respect to `t`.
  Tensor grad(const Tensor& t) const;

  void clear();
  std::size_t size() const { return nodes_.size(); }

  // Throws when `t` is linked to a different or cleared tape.
  void check_linked(const Tensor& t) const;

 private:
  struct Node {
    Shape shape;
    std::vector<std::optional<std::size_t>> inputs;
    BackwardFn backward;
    std::vector<double> grad;
  };

  std::vector<Node> nodes_;
  std::size_t generation_ = 1;
  bool has_gradients_ = false;
};

// The tape shared by the operands, or nullptr. Throws if operands are linked
// to two different tapes.
Tape* CommonTape(std::span<const Tensor> operands);

// ---- Elementwise ----------------------------------------------------------

enum class ElementwiseOp { kAdd, kSub, kMul, kDiv, kExp, kLog, kAbs, kNeg, kScalarMul, kScalarAdd };

// Generic entry point. Unary ops ignore `b`; scalar ops use `scalar`.
Tensor Elementwise(ElementwiseOp op, const Tensor& a, const Tensor* b = nullptr,
                   double scalar = 0.0);

Tensor Add(const Tensor& a, const Tensor& b);
Tensor Sub(const Tensor& a, const Tensor& b);
Tensor Mul(const Tensor& a, const Tensor& b);
// Throws std::domain_error on a zero divisor.
Tensor Div(const Tensor& a, const Tensor& b);
Tensor Exp(const Tensor& a);
// Throws std::domain_error on a non-positive argument.
Tensor Log(const Tensor& a);
// Subgradient at 0 is 0.
Tensor Abs(const Tensor& a);
Tensor Neg(const Tensor& a);
Tensor Scale(const Tensor& a, double factor);
Tensor Shift(const Tensor& a, double offset);
Tensor Square(const Tensor& a);
Tensor LeakyRelu(const Tensor& a, double slope);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return Add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return Sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return Mul(a, b); }
inline Tensor operator/(const Tensor& a, const Tensor& b) { return Div(a, b); }
inline Tensor operator-(const Tensor& a) { return Neg(a); }
inline Tensor operator*(const Tensor& a, double c) { return Scale(a, c); }
inline Tensor operator*(double c, const Tensor& a) { return Scale(a, c); }
inline Tensor operator+(const Tensor& a, double c) { return Shift(a, c); }

// ---- Reductions -----------------------------------------------------------

enum class ReduceOp { kSum, kMean, kMin, kMax };

// Reduces all elements (axis empty) or one axis. Sum/mean are differentiable;
// min/max return detached values and never touch the tape. Summation order is
// ascending index. Throws "empty reduction" on empty input.
Tensor Reduce(ReduceOp op, const Tensor& a, std::optional<std::size_t> axis = std::nullopt);

inline Tensor Sum(const Tensor& a) { return Reduce(ReduceOp::kSum, a); }
inline Tensor Mean(const Tensor& a) { return Reduce(ReduceOp::kMean, a); }
inline Tensor Sum(const Tensor& a, std::size_t axis) { return Reduce(ReduceOp::kSum, a, axis); }
inline Tensor Mean(const Tensor& a, std::size_t axis) { return Reduce(ReduceOp::kMean, a, axis); }

// Numerically stable softmax along `axis` (max subtracted before exp).
Tensor Softmax(const Tensor& a, std::size_t axis);

// ---- Structural -----------------------------------------------------------

Tensor Reshape(const Tensor& a, Shape shape);
// out[i] = a[indices[i]] on a flattened view; result is 1-D.
Tensor Gather(const Tensor& a, std::span<const std::size_t> indices);
// [n] -> [n, count], every row repeats the element.
Tensor RepeatColumns(const Tensor& a, std::size_t count);
// [m, k] x [k, n] -> [m, n].
Tensor MatMul(const Tensor& a, const Tensor& b);
// [m, n] + bias[n] added to every row.
Tensor AddBias(const Tensor& a, const Tensor& bias);
// Column j of an [m, n] matrix, shape [m].
Tensor Column(const Tensor& a, std::size_t j);

// ---- Verification ---------------------------------------------------------

// f records its computation on the given tape, starting from the supplied
// leaf, and returns a scalar.
using ScalarFn = std::function<Tensor(Tape&, const Tensor&)>;

// Relative error ||analytic - fd||_2 / max(||analytic||_2, ||fd||_2) with
// central differences of step h. Throws std::domain_error if f produces a
// non-finite value.
double GradCheck(const ScalarFn& f, const Tensor& x, double h = 1e-5);

}  // namespace sedkit

#endif  // SEDKIT_TENSOR_H_
