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

#include "sedkit/tensor.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sedkit {

std::size_t ShapeSize(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string ShapeToString(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ']';
  return os.str();
}

// ---- Tensor ---------------------------------------------------------------

Tensor::Tensor() : Tensor(Shape{}, std::vector<double>{0.0}) {}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)),
      data_(std::make_shared<const std::vector<double>>(std::move(data))) {
  if (ShapeSize(shape_) != data_->size()) {
    throw std::invalid_argument("tensor shape " + ShapeToString(shape_) + " does not match " +
                                std::to_string(data_->size()) + " values");
  }
}

Tensor Tensor::Scalar(double value) { return Tensor(Shape{}, {value}); }

Tensor Tensor::Vector(std::vector<double> values) {
  Shape shape{values.size()};
  return Tensor(std::move(shape), std::move(values));
}

Tensor Tensor::Full(Shape shape, double value) {
  std::vector<double> data(ShapeSize(shape), value);
  return Tensor(std::move(shape), std::move(data));
}

double Tensor::item() const {
  if (size() != 1) {
    throw std::invalid_argument("item() on tensor of shape " + ShapeToString(shape_));
  }
  return (*data_)[0];
}

// ---- Tape -----------------------------------------------------------------

void Tape::check_linked(const Tensor& t) const {
  if (t.tape_ != this) throw std::invalid_argument("tensor is not linked to this tape");
  if (t.generation_ != generation_ || t.node_ >= nodes_.size()) {
    throw std::invalid_argument("tensor refers to a cleared tape");
  }
}

Tensor Tape::variable(const Tensor& value) {
  Tensor out(value.shape_, value.data_);
  nodes_.push_back(Node{value.shape_, {}, nullptr, {}});
  out.tape_ = this;
  out.node_ = nodes_.size() - 1;
  out.generation_ = generation_;
  return out;
}

Tensor Tape::record(Shape shape, std::vector<double> data, std::span<const Tensor> inputs,
                    BackwardFn backward) {
  Node node;
  node.shape = shape;
  node.backward = std::move(backward);
  node.inputs.reserve(inputs.size());
  for (const Tensor& in : inputs) {
    if (in.tape_ == nullptr) {
      node.inputs.emplace_back(std::nullopt);
    } else {
      check_linked(in);
      node.inputs.emplace_back(in.node_);
    }
  }
  Tensor out(std::move(shape), std::move(data));
  nodes_.push_back(std::move(node));
  out.tape_ = this;
  out.node_ = nodes_.size() - 1;
  out.generation_ = generation_;
  return out;
}

void Tape::backward(const Tensor& root) {
  if (root.tape_ == nullptr) throw std::invalid_argument("backward root is not on a tape");
  check_linked(root);
  if (root.size() != 1) {
    throw std::invalid_argument("backward root must be scalar, got shape " +
                                ShapeToString(root.shape()));
  }
  for (Node& node : nodes_) node.grad.assign(ShapeSize(node.shape), 0.0);
  nodes_[root.node_].grad[0] = 1.0;

  std::vector<std::vector<double>*> in_grads;
  for (std::size_t i = root.node_ + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.backward) continue;
    in_grads.clear();
    bool any = false;
    for (const auto& input : node.inputs) {
      if (input) {
        in_grads.push_back(&nodes_[*input].grad);
        any = true;
      } else {
        in_grads.push_back(nullptr);
      }
    }
    if (any) node.backward(node.grad, in_grads);
  }
  has_gradients_ = true;
}

Tensor Tape::grad(const Tensor& t) const {
  check_linked(t);
  if (!has_gradients_) throw std::logic_error("grad() called before backward()");
  return Tensor(t.shape_, nodes_[t.node_].grad);
}

void Tape::clear() {
  nodes_.clear();
  ++generation_;
  has_gradients_ = false;
}

Tape* CommonTape(std::span<const Tensor> operands) {
  Tape* tape = nullptr;
  for (const Tensor& t : operands) {
    if (!t.on_tape()) continue;
    if (tape != nullptr && tape != t.tape()) {
      throw std::invalid_argument("operands are recorded on different tapes");
    }
    tape = t.tape();
  }
  return tape;
}

namespace {

void CheckFinite(const std::vector<double>& data, const char* op) {
  for (double v : data) {
    if (!std::isfinite(v)) {
      throw std::domain_error(std::string("non-finite result in ") + op);
    }
  }
}

// Wraps up an op: value check, then tape recording when any operand is linked.
Tensor Finish(const char* op, Shape shape, std::vector<double> data,
              std::initializer_list<Tensor> inputs, BackwardFn backward) {
  CheckFinite(data, op);
  std::vector<Tensor> ins(inputs);
  Tape* tape = CommonTape(ins);
  if (tape == nullptr) return Tensor(std::move(shape), std::move(data));
  return tape->record(std::move(shape), std::move(data), ins, std::move(backward));
}

struct BroadcastPlan {
  Shape shape;
  std::size_t n = 0;
  bool a_scalar = false;
  bool b_scalar = false;
};

BroadcastPlan PlanBinary(const Tensor& a, const Tensor& b, const char* op) {
  BroadcastPlan p;
  if (a.shape() == b.shape()) {
    p.shape = a.shape();
  } else if (b.size() == 1) {
    p.shape = a.shape();
    p.b_scalar = true;
  } else if (a.size() == 1) {
    p.shape = b.shape();
    p.a_scalar = true;
  } else {
    throw std::invalid_argument(std::string("shape mismatch in ") + op + ": " +
                                ShapeToString(a.shape()) + " vs " + ShapeToString(b.shape()));
  }
  p.n = ShapeSize(p.shape);
  return p;
}

// d(out)/d(a) and d(out)/d(b) for a binary op, evaluated per element.
template <typename Fwd, typename DA, typename DB>
Tensor Binary(const char* name, const Tensor& a, const Tensor& b, Fwd fwd, DA da, DB db) {
  const BroadcastPlan p = PlanBinary(a, b, name);
  std::vector<double> out(p.n);
  const auto& av = a.values();
  const auto& bv = b.values();
  for (std::size_t i = 0; i < p.n; ++i) {
    out[i] = fwd(av[p.a_scalar ? 0 : i], bv[p.b_scalar ? 0 : i]);
  }
  Tensor a_val = a.detach();
  Tensor b_val = b.detach();
  auto backward = [p, a_val, b_val, da, db](std::span<const double> g,
                                            std::span<std::vector<double>* const> in) {
    const auto& av = a_val.values();
    const auto& bv = b_val.values();
    for (std::size_t i = 0; i < p.n; ++i) {
      const double x = av[p.a_scalar ? 0 : i];
      const double y = bv[p.b_scalar ? 0 : i];
      if (in[0]) (*in[0])[p.a_scalar ? 0 : i] += g[i] * da(x, y);
      if (in[1]) (*in[1])[p.b_scalar ? 0 : i] += g[i] * db(x, y);
    }
  };
  return Finish(name, p.shape, std::move(out), {a, b}, backward);
}

// dfn receives (input, output) so ops like exp can reuse the forward value.
template <typename Fwd, typename Deriv>
Tensor Unary(const char* name, const Tensor& a, Fwd fwd, Deriv dfn) {
  std::vector<double> out(a.size());
  const auto& av = a.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(av[i]);
  Tensor a_val = a.detach();
  auto out_vals = std::make_shared<std::vector<double>>(out);
  auto backward = [a_val, out_vals, dfn](std::span<const double> g,
                                         std::span<std::vector<double>* const> in) {
    const auto& av = a_val.values();
    for (std::size_t i = 0; i < g.size(); ++i) (*in[0])[i] += g[i] * dfn(av[i], (*out_vals)[i]);
  };
  return Finish(name, a.shape(), std::move(out), {a}, backward);
}

}  // namespace

// ---- Elementwise ----------------------------------------------------------

Tensor Add(const Tensor& a, const Tensor& b) {
  return Binary(
      "add", a, b, [](double x, double y) { return x + y; }, [](double, double) { return 1.0; },
      [](double, double) { return 1.0; });
}

Tensor Sub(const Tensor& a, const Tensor& b) {
  return Binary(
      "sub", a, b, [](double x, double y) { return x - y; }, [](double, double) { return 1.0; },
      [](double, double) { return -1.0; });
}

Tensor Mul(const Tensor& a, const Tensor& b) {
  return Binary(
      "mul", a, b, [](double x, double y) { return x * y; }, [](double, double y) { return y; },
      [](double x, double) { return x; });
}

Tensor Div(const Tensor& a, const Tensor& b) {
  for (double v : b.values()) {
    if (v == 0.0) throw std::domain_error("division by zero");
  }
  return Binary(
      "div", a, b, [](double x, double y) { return x / y; },
      [](double, double y) { return 1.0 / y; }, [](double x, double y) { return -x / (y * y); });
}

Tensor Exp(const Tensor& a) {
  return Unary(
      "exp", a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor Log(const Tensor& a) {
  for (double v : a.values()) {
    if (!(v > 0.0)) throw std::domain_error("log of non-positive value");
  }
  return Unary(
      "log", a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor Abs(const Tensor& a) {
  return Unary(
      "abs", a, [](double x) { return std::abs(x); },
      [](double x, double) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Tensor Neg(const Tensor& a) {
  return Unary(
      "neg", a, [](double x) { return -x; }, [](double, double) { return -1.0; });
}

Tensor Scale(const Tensor& a, double factor) {
  return Unary(
      "scalar-mul", a, [factor](double x) { return factor * x; },
      [factor](double, double) { return factor; });
}

Tensor Shift(const Tensor& a, double offset) {
  return Unary(
      "scalar-add", a, [offset](double x) { return x + offset; },
      [](double, double) { return 1.0; });
}

Tensor Square(const Tensor& a) {
  return Unary(
      "square", a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Tensor LeakyRelu(const Tensor& a, double slope) {
  return Unary(
      "leaky-relu", a, [slope](double x) { return x > 0.0 ? x : slope * x; },
      [slope](double x, double) { return x > 0.0 ? 1.0 : slope; });
}

Tensor Elementwise(ElementwiseOp op, const Tensor& a, const Tensor* b, double scalar) {
  auto need_b = [&]() -> const Tensor& {
    if (b == nullptr) throw std::invalid_argument("binary elementwise op needs two operands");
    return *b;
  };
  switch (op) {
    case ElementwiseOp::kAdd: return Add(a, need_b());
    case ElementwiseOp::kSub: return Sub(a, need_b());
    case ElementwiseOp::kMul: return Mul(a, need_b());
    case ElementwiseOp::kDiv: return Div(a, need_b());
    case ElementwiseOp::kExp: return Exp(a);
    case ElementwiseOp::kLog: return Log(a);
    case ElementwiseOp::kAbs: return Abs(a);
    case ElementwiseOp::kNeg: return Neg(a);
    case ElementwiseOp::kScalarMul: return Scale(a, scalar);
    case ElementwiseOp::kScalarAdd: return Shift(a, scalar);
  }
  throw std::invalid_argument("unknown elementwise op");
}

// ---- Reductions -----------------------------------------------------------

namespace {

// View of `shape` around `axis` as [outer, extent, inner].
struct AxisView {
  std::size_t outer = 1, extent = 1, inner = 1;
  Shape reduced;
};

AxisView ViewAxis(const Shape& shape, std::size_t axis) {
  if (axis >= shape.size()) {
    throw std::invalid_argument("axis " + std::to_string(axis) + " out of range for shape " +
                                ShapeToString(shape));
  }
  AxisView v;
  for (std::size_t d = 0; d < axis; ++d) v.outer *= shape[d];
  v.extent = shape[axis];
  for (std::size_t d = axis + 1; d < shape.size(); ++d) v.inner *= shape[d];
  for (std::size_t d = 0; d < shape.size(); ++d) {
    if (d != axis) v.reduced.push_back(shape[d]);
  }
  return v;
}

}  // namespace

Tensor Reduce(ReduceOp op, const Tensor& a, std::optional<std::size_t> axis) {
  if (a.size() == 0) throw std::invalid_argument("empty reduction");
  AxisView v;
  if (axis) {
    v = ViewAxis(a.shape(), *axis);
    if (v.extent == 0) throw std::invalid_argument("empty reduction");
  } else {
    v.extent = a.size();
  }
  const auto& x = a.values();
  std::vector<double> out(v.outer * v.inner);
  for (std::size_t o = 0; o < v.outer; ++o) {
    for (std::size_t in = 0; in < v.inner; ++in) {
      const std::size_t base = o * v.extent * v.inner + in;
      double acc = x[base];
      for (std::size_t k = 1; k < v.extent; ++k) {
        const double e = x[base + k * v.inner];
        switch (op) {
          case ReduceOp::kSum:
          case ReduceOp::kMean: acc += e; break;
          case ReduceOp::kMin: acc = std::min(acc, e); break;
          case ReduceOp::kMax: acc = std::max(acc, e); break;
        }
      }
      if (op == ReduceOp::kMean) acc /= static_cast<double>(v.extent);
      out[o * v.inner + in] = acc;
    }
  }
  if (op == ReduceOp::kMin || op == ReduceOp::kMax) {
    return Tensor(v.reduced, std::move(out));
  }
  const double factor = op == ReduceOp::kMean ? 1.0 / static_cast<double>(v.extent) : 1.0;
  auto backward = [v, factor](std::span<const double> g,
                              std::span<std::vector<double>* const> in) {
    auto& ga = *in[0];
    for (std::size_t o = 0; o < v.outer; ++o) {
      for (std::size_t i = 0; i < v.inner; ++i) {
        const double gi = g[o * v.inner + i] * factor;
        const std::size_t base = o * v.extent * v.inner + i;
        for (std::size_t k = 0; k < v.extent; ++k) ga[base + k * v.inner] += gi;
      }
    }
  };
  return Finish(op == ReduceOp::kSum ? "sum" : "mean", v.reduced, std::move(out), {a},
                backward);
}

Tensor Softmax(const Tensor& a, std::size_t axis) {
  const AxisView v = ViewAxis(a.shape(), axis);
  const auto& x = a.values();
  std::vector<double> out(x.size());
  for (std::size_t o = 0; o < v.outer; ++o) {
    for (std::size_t in = 0; in < v.inner; ++in) {
      const std::size_t base = o * v.extent * v.inner + in;
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < v.extent; ++k) mx = std::max(mx, x[base + k * v.inner]);
      double total = 0.0;
      for (std::size_t k = 0; k < v.extent; ++k) {
        const double e = std::exp(x[base + k * v.inner] - mx);
        out[base + k * v.inner] = e;
        total += e;
      }
      for (std::size_t k = 0; k < v.extent; ++k) out[base + k * v.inner] /= total;
    }
  }
  auto probs = std::make_shared<std::vector<double>>(out);
  auto backward = [v, probs](std::span<const double> g, std::span<std::vector<double>* const> in) {
    auto& ga = *in[0];
    const auto& p = *probs;
    for (std::size_t o = 0; o < v.outer; ++o) {
      for (std::size_t i = 0; i < v.inner; ++i) {
        const std::size_t base = o * v.extent * v.inner + i;
        double dot = 0.0;
        for (std::size_t k = 0; k < v.extent; ++k) {
          dot += g[base + k * v.inner] * p[base + k * v.inner];
        }
        for (std::size_t k = 0; k < v.extent; ++k) {
          const std::size_t idx = base + k * v.inner;
          ga[idx] += p[idx] * (g[idx] - dot);
        }
      }
    }
  };
  return Finish("softmax", a.shape(), std::move(out), {a}, backward);
}

// ---- Structural -----------------------------------------------------------

Tensor Reshape(const Tensor& a, Shape shape) {
  if (ShapeSize(shape) != a.size()) {
    throw std::invalid_argument("cannot reshape " + ShapeToString(a.shape()) + " to " +
                                ShapeToString(shape));
  }
  auto backward = [](std::span<const double> g, std::span<std::vector<double>* const> in) {
    auto& ga = *in[0];
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
  };
  return Finish("reshape", std::move(shape), a.values(), {a}, backward);
}

Tensor Gather(const Tensor& a, std::span<const std::size_t> indices) {
  std::vector<double> out(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= a.size()) throw std::out_of_range("gather index out of range");
    out[i] = a[indices[i]];
  }
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  auto backward = [idx](std::span<const double> g, std::span<std::vector<double>* const> in) {
    auto& ga = *in[0];
    for (std::size_t i = 0; i < idx.size(); ++i) ga[idx[i]] += g[i];
  };
  return Finish("gather", Shape{indices.size()}, std::move(out), {a}, backward);
}

Tensor RepeatColumns(const Tensor& a, std::size_t count) {
  if (a.rank() != 1) throw std::invalid_argument("RepeatColumns expects a 1-D tensor");
  const std::size_t n = a.size();
  std::vector<double> out(n * count);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(i * count), count, a[i]);
  }
  auto backward = [n, count](std::span<const double> g, std::span<std::vector<double>* const> in) {
    auto& ga = *in[0];
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < count; ++j) acc += g[i * count + j];
      ga[i] += acc;
    }
  };
  return Finish("repeat-columns", Shape{n, count}, std::move(out), {a}, backward);
}

Tensor MatMul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.shape()[1] != b.shape()[0]) {
    throw std::invalid_argument("shape mismatch in matmul: " + ShapeToString(a.shape()) + " x " +
                                ShapeToString(b.shape()));
  }
  const std::size_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  const auto& av = a.values();
  const auto& bv = b.values();
  std::vector<double> out(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double x = av[i * k + p];
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += x * bv[p * n + j];
    }
  }
  Tensor a_val = a.detach();
  Tensor b_val = b.detach();
  auto backward = [m, k, n, a_val, b_val](std::span<const double> g,
                                          std::span<std::vector<double>* const> in) {
    const auto& av = a_val.values();
    const auto& bv = b_val.values();
    if (in[0]) {
      auto& ga = *in[0];
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += g[i * n + j] * bv[p * n + j];
          ga[i * k + p] += acc;
        }
      }
    }
    if (in[1]) {
      auto& gb = *in[1];
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          const double x = av[i * k + p];
          for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += x * g[i * n + j];
        }
      }
    }
  };
  return Finish("matmul", Shape{m, n}, std::move(out), {a, b}, backward);
}

Tensor AddBias(const Tensor& a, const Tensor& bias) {
  if (a.rank() != 2 || bias.rank() != 1 || bias.size() != a.shape()[1]) {
    throw std::invalid_argument("shape mismatch in add-bias: " + ShapeToString(a.shape()) +
                                " + " + ShapeToString(bias.shape()));
  }
  const std::size_t m = a.shape()[0], n = a.shape()[1];
  std::vector<double> out(a.values());
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] += bias[j];
  }
  auto backward = [m, n](std::span<const double> g, std::span<std::vector<double>* const> in) {
    if (in[0]) {
      for (std::size_t i = 0; i < g.size(); ++i) (*in[0])[i] += g[i];
    }
    if (in[1]) {
      auto& gb = *in[1];
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) gb[j] += g[i * n + j];
      }
    }
  };
  return Finish("add-bias", a.shape(), std::move(out), {a, bias}, backward);
}

Tensor Column(const Tensor& a, std::size_t j) {
  if (a.rank() != 2 || j >= a.shape()[1]) {
    throw std::invalid_argument("column " + std::to_string(j) + " out of range for " +
                                ShapeToString(a.shape()));
  }
  const std::size_t m = a.shape()[0], n = a.shape()[1];
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = a[i * n + j];
  auto backward = [m, n, j](std::span<const double> g, std::span<std::vector<double>* const> in) {
    auto& ga = *in[0];
    for (std::size_t i = 0; i < m; ++i) ga[i * n + j] += g[i];
  };
  return Finish("column", Shape{m}, std::move(out), {a}, backward);
}

// ---- Verification ---------------------------------------------------------

double GradCheck(const ScalarFn& f, const Tensor& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("grad check step must be positive");
  Tape tape;
  const Tensor leaf = tape.variable(x.detach());
  const Tensor y = f(tape, leaf);
  if (!std::isfinite(y.item())) throw std::domain_error("grad check function returned NaN");
  tape.backward(y);
  const Tensor analytic = tape.grad(leaf);

  auto eval = [&](const std::vector<double>& values) {
    Tape scratch;
    const Tensor at = scratch.variable(Tensor(x.shape(), values));
    const double v = f(scratch, at).item();
    if (!std::isfinite(v)) throw std::domain_error("grad check function returned NaN");
    return v;
  };

  double diff2 = 0.0, analytic2 = 0.0, fd2 = 0.0;
  std::vector<double> probe(x.values());
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double x0 = probe[i];
    probe[i] = x0 + h;
    const double up = eval(probe);
    probe[i] = x0 - h;
    const double down = eval(probe);
    probe[i] = x0;
    const double fd = (up - down) / (2.0 * h);
    diff2 += (analytic[i] - fd) * (analytic[i] - fd);
    analytic2 += analytic[i] * analytic[i];
    fd2 += fd * fd;
  }
  return std::sqrt(diff2) / std::max(1e-12, std::sqrt(std::max(analytic2, fd2)));
}

}  // namespace sedkit
