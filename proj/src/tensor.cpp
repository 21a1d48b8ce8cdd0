#include "sigtraj/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace sigtraj {

int shape_numel(const Shape& s) {
  int n = 1;
  for (int d : s) {
    if (d < 0) throw ShapeError("negative dimension in shape " + shape_str(s));
    n *= d;
  }
  return n;
}

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) os << ',';
    os << s[i];
  }
  os << ']';
  return os.str();
}

namespace {

[[noreturn]] void shape_fail(const char* op, const Shape& a, const Shape& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + shape_str(a) + " and " + shape_str(b));
}

[[noreturn]] void shape_fail(const char* op, const Shape& a) {
  throw ShapeError(std::string(op) + ": invalid shape " + shape_str(a));
}

void check_same_tape(const char* op, Tensor a, Tensor b) {
  if (a.node()->tape != b.node()->tape)
    throw std::logic_error(std::string(op) + ": operands belong to different tapes");
}

// True iff b's shape is a strict suffix of a's (bias-style broadcast).
bool is_suffix(const Shape& a, const Shape& b) {
  if (b.size() >= a.size()) return false;
  return std::equal(b.rbegin(), b.rend(), a.rbegin());
}

struct AxisSplit {
  int outer, axis, inner;
};

AxisSplit split_axis(const Shape& s, int axis, const char* op) {
  if (axis < 0 || axis >= static_cast<int>(s.size())) shape_fail(op, s);
  int outer = 1, inner = 1;
  for (int i = 0; i < axis; ++i) outer *= s[i];
  for (size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  return {outer, s[axis], inner};
}

}  // namespace

Tensor Tape::leaf(Shape shape, std::vector<double> values, bool requires_grad) {
  if (shape_numel(shape) != static_cast<int>(values.size()))
    throw ShapeError("leaf: data length " + std::to_string(values.size()) + " does not match shape " + shape_str(shape));
  TensorNode* n = make(std::move(shape), 0, requires_grad);
  n->value = std::move(values);
  return Tensor(n);
}

Tensor Tape::zeros(Shape shape, bool requires_grad) {
  const int n = shape_numel(shape);
  return leaf(std::move(shape), std::vector<double>(static_cast<size_t>(n), 0.0), requires_grad);
}

TensorNode* Tape::make(Shape shape, size_t numel_hint, bool requires_grad) {
  nodes_.emplace_back();
  TensorNode* n = &nodes_.back();
  n->shape = std::move(shape);
  if (numel_hint) n->value.assign(numel_hint, 0.0);
  n->requires_grad = requires_grad;
  n->index = static_cast<int>(nodes_.size()) - 1;
  n->tape = this;
  return n;
}

void Tape::backward(const Tensor& root) {
  TensorNode* r = root.node();
  if (r == nullptr || r->tape != this) throw std::logic_error("backward: root does not live on this tape");
  if (r->numel() != 1) throw ShapeError("backward: root must be scalar, got shape " + shape_str(r->shape));
  // Leaves accumulate across calls; intermediate grads are per-sweep scratch.
  for (auto& n : nodes_) {
    if (!n.requires_grad) continue;
    if (n.backprop)
      n.grad.assign(n.value.size(), 0.0);
    else
      n.ensure_grad();
  }
  r->ensure_grad();
  r->grad[0] += 1.0;
  for (int i = r->index; i >= 0; --i) {
    TensorNode& n = nodes_[static_cast<size_t>(i)];
    if (n.requires_grad && n.backprop) n.backprop();
  }
}

void Tape::zero_grad() {
  for (auto& n : nodes_) std::fill(n.grad.begin(), n.grad.end(), 0.0);
}

namespace {

TensorNode* result_node(Tensor a, Shape shape) {
  return a.node()->tape->make(std::move(shape), 0, a.node()->requires_grad);
}

TensorNode* result_node(Tensor a, Tensor b, Shape shape) {
  return a.node()->tape->make(std::move(shape), 0, a.node()->requires_grad || b.node()->requires_grad);
}

// Shared elementwise-with-suffix-broadcast machinery for add/sub/mul.
template <typename FwdFn, typename BwdFn>
Tensor broadcast_binary(const char* op, Tensor a, Tensor b, FwdFn fwd, BwdFn bwd) {
  check_same_tape(op, a, b);
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  const bool equal = sa == sb;
  if (!equal && !is_suffix(sa, sb)) shape_fail(op, sa, sb);
  TensorNode* out = result_node(a, b, sa);
  const int n = shape_numel(sa);
  const int bn = std::max(1, shape_numel(sb));
  out->value.resize(static_cast<size_t>(n));
  const auto& av = a.node()->value;
  const auto& bv = b.node()->value;
  for (int i = 0; i < n; ++i) out->value[static_cast<size_t>(i)] = fwd(av[static_cast<size_t>(i)], bv[static_cast<size_t>(i % bn)]);
  if (out->requires_grad) {
    TensorNode* an = a.node();
    TensorNode* bn_node = b.node();
    TensorNode* on = out;
    out->backprop = [an, bn_node, on, n, bn, bwd]() {
      for (int i = 0; i < n; ++i) {
        const double g = on->grad[static_cast<size_t>(i)];
        if (g == 0.0) continue;
        double da, db;
        bwd(an->value[static_cast<size_t>(i)], bn_node->value[static_cast<size_t>(i % bn)], g, da, db);
        if (an->requires_grad) an->grad[static_cast<size_t>(i)] += da;
        if (bn_node->requires_grad) bn_node->grad[static_cast<size_t>(i % bn)] += db;
      }
    };
  }
  return Tensor(out);
}

template <typename FwdFn, typename BwdFn>
Tensor unary_elementwise(Tensor a, Shape shape, FwdFn fwd, BwdFn bwd) {
  TensorNode* out = result_node(a, std::move(shape));
  const int n = a.numel();
  out->value.resize(static_cast<size_t>(n));
  const auto& av = a.node()->value;
  for (int i = 0; i < n; ++i) out->value[static_cast<size_t>(i)] = fwd(av[static_cast<size_t>(i)]);
  if (out->requires_grad) {
    TensorNode* an = a.node();
    TensorNode* on = out;
    out->backprop = [an, on, n, bwd]() {
      for (int i = 0; i < n; ++i)
        an->grad[static_cast<size_t>(i)] += on->grad[static_cast<size_t>(i)] * bwd(an->value[static_cast<size_t>(i)], on->value[static_cast<size_t>(i)]);
    };
  }
  return Tensor(out);
}

}  // namespace

Tensor add(Tensor a, Tensor b) {
  return broadcast_binary(
      "add", a, b, [](double x, double y) { return x + y; },
      [](double, double, double g, double& da, double& db) { da = g; db = g; });
}

Tensor sub(Tensor a, Tensor b) {
  return broadcast_binary(
      "sub", a, b, [](double x, double y) { return x - y; },
      [](double, double, double g, double& da, double& db) { da = g; db = -g; });
}

Tensor mul(Tensor a, Tensor b) {
  return broadcast_binary(
      "mul", a, b, [](double x, double y) { return x * y; },
      [](double x, double y, double g, double& da, double& db) { da = g * y; db = g * x; });
}

Tensor scale(Tensor a, double s) {
  return unary_elementwise(a, a.shape(), [s](double x) { return s * x; }, [s](double, double) { return s; });
}

Tensor matmul(Tensor a, Tensor b) {
  check_same_tape("matmul", a, b);
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  if (sa.size() != 2 || sb.size() != 2 || sa[1] != sb[0]) shape_fail("matmul", sa, sb);
  const int m = sa[0], k = sa[1], n = sb[1];
  TensorNode* out = result_node(a, b, {m, n});
  out->value.assign(static_cast<size_t>(m) * n, 0.0);
  const double* A = a.node()->value.data();
  const double* B = b.node()->value.data();
  double* C = out->value.data();
  for (int i = 0; i < m; ++i)
    for (int p = 0; p < k; ++p) {
      const double aip = A[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = B + p * n;
      double* crow = C + i * n;
      for (int j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  if (out->requires_grad) {
    TensorNode* an = a.node();
    TensorNode* bn = b.node();
    TensorNode* on = out;
    out->backprop = [an, bn, on, m, k, n]() {
      const double* G = on->grad.data();
      if (an->requires_grad) {
        double* dA = an->grad.data();
        const double* B = bn->value.data();
        for (int i = 0; i < m; ++i)
          for (int p = 0; p < k; ++p) {
            double acc = 0.0;
            const double* grow = G + i * n;
            const double* brow = B + p * n;
            for (int j = 0; j < n; ++j) acc += grow[j] * brow[j];
            dA[i * k + p] += acc;
          }
      }
      if (bn->requires_grad) {
        double* dB = bn->grad.data();
        const double* A = an->value.data();
        for (int i = 0; i < m; ++i)
          for (int p = 0; p < k; ++p) {
            const double aip = A[i * k + p];
            if (aip == 0.0) continue;
            const double* grow = G + i * n;
            double* brow = dB + p * n;
            for (int j = 0; j < n; ++j) brow[j] += aip * grow[j];
          }
      }
    };
  }
  return Tensor(out);
}

Tensor concat(const std::vector<Tensor>& parts, int axis) {
  if (parts.empty()) throw ShapeError("concat: no operands");
  const Shape& s0 = parts[0].shape();
  Shape out_shape = s0;
  const AxisSplit sp = split_axis(s0, axis, "concat");
  int total_axis = 0;
  for (const Tensor& t : parts) {
    check_same_tape("concat", parts[0], t);
    const Shape& s = t.shape();
    if (s.size() != s0.size()) shape_fail("concat", s0, s);
    for (size_t i = 0; i < s.size(); ++i)
      if (static_cast<int>(i) != axis && s[i] != s0[i]) shape_fail("concat", s0, s);
    total_axis += s[static_cast<size_t>(axis)];
  }
  out_shape[static_cast<size_t>(axis)] = total_axis;
  bool any_grad = false;
  for (const Tensor& t : parts) any_grad = any_grad || t.requires_grad();
  TensorNode* out = parts[0].node()->tape->make(out_shape, 0, any_grad);
  out->value.resize(static_cast<size_t>(shape_numel(out_shape)));
  const int inner = sp.inner;
  const int out_stride = total_axis * inner;
  int axis_offset = 0;
  std::vector<TensorNode*> srcs;
  std::vector<int> offsets, axis_sizes;
  for (const Tensor& t : parts) {
    const int ta = t.shape()[static_cast<size_t>(axis)];
    for (int o = 0; o < sp.outer; ++o) {
      const double* src = t.node()->value.data() + static_cast<size_t>(o) * ta * inner;
      double* dst = out->value.data() + static_cast<size_t>(o) * out_stride + static_cast<size_t>(axis_offset) * inner;
      std::copy(src, src + static_cast<size_t>(ta) * inner, dst);
    }
    srcs.push_back(t.node());
    offsets.push_back(axis_offset);
    axis_sizes.push_back(ta);
    axis_offset += ta;
  }
  if (out->requires_grad) {
    TensorNode* on = out;
    const int outer = sp.outer;
    out->backprop = [srcs, offsets, axis_sizes, on, outer, inner, out_stride]() {
      for (size_t pi = 0; pi < srcs.size(); ++pi) {
        TensorNode* src = srcs[pi];
        if (!src->requires_grad) continue;
        const int ta = axis_sizes[pi];
        for (int o = 0; o < outer; ++o) {
          const double* g = on->grad.data() + static_cast<size_t>(o) * out_stride + static_cast<size_t>(offsets[pi]) * inner;
          double* dst = src->grad.data() + static_cast<size_t>(o) * ta * inner;
          for (int i = 0; i < ta * inner; ++i) dst[i] += g[i];
        }
      }
    };
  }
  return Tensor(out);
}

Tensor slice(Tensor a, int axis, int start, int len) {
  const Shape& s = a.shape();
  const AxisSplit sp = split_axis(s, axis, "slice");
  if (start < 0 || len < 0 || start + len > sp.axis)
    throw ShapeError("slice: range [" + std::to_string(start) + "," + std::to_string(start + len) + ") out of bounds for shape " + shape_str(s));
  Shape out_shape = s;
  out_shape[static_cast<size_t>(axis)] = len;
  TensorNode* out = result_node(a, out_shape);
  out->value.resize(static_cast<size_t>(shape_numel(out_shape)));
  const int inner = sp.inner;
  const int in_stride = sp.axis * inner;
  const int out_stride = len * inner;
  for (int o = 0; o < sp.outer; ++o) {
    const double* src = a.node()->value.data() + static_cast<size_t>(o) * in_stride + static_cast<size_t>(start) * inner;
    std::copy(src, src + out_stride, out->value.data() + static_cast<size_t>(o) * out_stride);
  }
  if (out->requires_grad) {
    TensorNode* an = a.node();
    TensorNode* on = out;
    const int outer = sp.outer;
    out->backprop = [an, on, outer, inner, in_stride, out_stride, start]() {
      for (int o = 0; o < outer; ++o) {
        const double* g = on->grad.data() + static_cast<size_t>(o) * out_stride;
        double* dst = an->grad.data() + static_cast<size_t>(o) * in_stride + static_cast<size_t>(start) * inner;
        for (int i = 0; i < out_stride; ++i) dst[i] += g[i];
      }
    };
  }
  return Tensor(out);
}

Tensor reshape(Tensor a, Shape shape) {
  if (shape_numel(shape) != a.numel()) shape_fail("reshape", a.shape(), shape);
  TensorNode* out = result_node(a, std::move(shape));
  out->value = a.node()->value;
  if (out->requires_grad) {
    TensorNode* an = a.node();
    TensorNode* on = out;
    out->backprop = [an, on]() {
      for (size_t i = 0; i < an->grad.size(); ++i) an->grad[i] += on->grad[i];
    };
  }
  return Tensor(out);
}

namespace {

Tensor reduce_axis(Tensor a, int axis, bool take_mean, const char* op) {
  const Shape& s = a.shape();
  const AxisSplit sp = split_axis(s, axis, op);
  Shape out_shape;
  for (size_t i = 0; i < s.size(); ++i)
    if (static_cast<int>(i) != axis) out_shape.push_back(s[i]);
  if (out_shape.empty()) out_shape = {1};
  TensorNode* out = result_node(a, out_shape);
  out->value.assign(static_cast<size_t>(sp.outer) * sp.inner, 0.0);
  const double w = take_mean ? 1.0 / std::max(1, sp.axis) : 1.0;
  const auto& av = a.node()->value;
  for (int o = 0; o < sp.outer; ++o)
    for (int x = 0; x < sp.axis; ++x)
      for (int i = 0; i < sp.inner; ++i)
        out->value[static_cast<size_t>(o) * sp.inner + i] += w * av[(static_cast<size_t>(o) * sp.axis + x) * sp.inner + i];
  if (out->requires_grad) {
    TensorNode* an = a.node();
    TensorNode* on = out;
    const AxisSplit c = sp;
    out->backprop = [an, on, c, w]() {
      for (int o = 0; o < c.outer; ++o)
        for (int x = 0; x < c.axis; ++x)
          for (int i = 0; i < c.inner; ++i)
            an->grad[(static_cast<size_t>(o) * c.axis + x) * c.inner + i] += w * on->grad[static_cast<size_t>(o) * c.inner + i];
    };
  }
  return Tensor(out);
}

}  // namespace

Tensor sum(Tensor a, int axis) { return reduce_axis(a, axis, false, "sum"); }
Tensor mean(Tensor a, int axis) { return reduce_axis(a, axis, true, "mean"); }

Tensor sum_all(Tensor a) {
  Tensor flat = reshape(a, {a.numel()});
  return sum(flat, 0);
}

Tensor mean_all(Tensor a) {
  Tensor flat = reshape(a, {a.numel()});
  return mean(flat, 0);
}

Tensor sin(Tensor a) {
  return unary_elementwise(a, a.shape(), [](double x) { return std::sin(x); }, [](double x, double) { return std::cos(x); });
}

Tensor leaky_relu(Tensor a, double slope) {
  return unary_elementwise(
      a, a.shape(), [slope](double x) { return x >= 0.0 ? x : slope * x; },
      [slope](double x, double) { return x >= 0.0 ? 1.0 : slope; });
}

Tensor softmax(Tensor a, int axis) {
  const Shape& s = a.shape();
  const AxisSplit sp = split_axis(s, axis, "softmax");
  TensorNode* out = result_node(a, s);
  out->value.resize(a.node()->value.size());
  const auto& av = a.node()->value;
  auto idx = [&sp](int o, int x, int i) { return (static_cast<size_t>(o) * sp.axis + x) * sp.inner + i; };
  for (int o = 0; o < sp.outer; ++o)
    for (int i = 0; i < sp.inner; ++i) {
      double mx = -HUGE_VAL;
      for (int x = 0; x < sp.axis; ++x) mx = std::max(mx, av[idx(o, x, i)]);
      double denom = 0.0;
      for (int x = 0; x < sp.axis; ++x) denom += std::exp(av[idx(o, x, i)] - mx);
      for (int x = 0; x < sp.axis; ++x) out->value[idx(o, x, i)] = std::exp(av[idx(o, x, i)] - mx) / denom;
    }
  if (out->requires_grad) {
    TensorNode* an = a.node();
    TensorNode* on = out;
    const AxisSplit c = sp;
    out->backprop = [an, on, c]() {
      auto idx = [&c](int o, int x, int i) { return (static_cast<size_t>(o) * c.axis + x) * c.inner + i; };
      for (int o = 0; o < c.outer; ++o)
        for (int i = 0; i < c.inner; ++i) {
          double dot = 0.0;
          for (int x = 0; x < c.axis; ++x) dot += on->grad[idx(o, x, i)] * on->value[idx(o, x, i)];
          for (int x = 0; x < c.axis; ++x)
            an->grad[idx(o, x, i)] += on->value[idx(o, x, i)] * (on->grad[idx(o, x, i)] - dot);
        }
    };
  }
  return Tensor(out);
}

Tensor huber(Tensor a, double delta) {
  return unary_elementwise(
      a, a.shape(),
      [delta](double x) {
        const double ax = std::fabs(x);
        return ax <= delta ? 0.5 * x * x : delta * (ax - 0.5 * delta);
      },
      [delta](double x, double) { return std::fmax(-delta, std::fmin(delta, x)); });
}

Tensor cross_entropy(Tensor logits, const std::vector<int>& targets) {
  const Shape& s = logits.shape();
  if (s.size() != 2) throw ShapeError("cross_entropy: logits must be [n,C], got " + shape_str(s));
  const int n = s[0], c = s[1];
  if (static_cast<int>(targets.size()) != n)
    throw ShapeError("cross_entropy: " + std::to_string(targets.size()) + " targets for " + std::to_string(n) + " rows");
  for (int t : targets)
    if (t >= c) throw ShapeError("cross_entropy: target " + std::to_string(t) + " out of range for C=" + std::to_string(c));
  TensorNode* out = result_node(logits, {n});
  out->value.assign(static_cast<size_t>(n), 0.0);
  const auto& lv = logits.node()->value;
  std::vector<double> lse(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    if (targets[i] < 0) continue;
    double mx = -HUGE_VAL;
    for (int j = 0; j < c; ++j) mx = std::max(mx, lv[static_cast<size_t>(i) * c + j]);
    double denom = 0.0;
    for (int j = 0; j < c; ++j) denom += std::exp(lv[static_cast<size_t>(i) * c + j] - mx);
    lse[static_cast<size_t>(i)] = mx + std::log(denom);
    out->value[static_cast<size_t>(i)] = lse[static_cast<size_t>(i)] - lv[static_cast<size_t>(i) * c + targets[static_cast<size_t>(i)]];
  }
  if (out->requires_grad) {
    TensorNode* ln = logits.node();
    TensorNode* on = out;
    std::vector<int> tg = targets;
    out->backprop = [ln, on, tg, lse, n, c]() {
      for (int i = 0; i < n; ++i) {
        if (tg[static_cast<size_t>(i)] < 0) continue;
        const double g = on->grad[static_cast<size_t>(i)];
        if (g == 0.0) continue;
        for (int j = 0; j < c; ++j) {
          const double p = std::exp(ln->value[static_cast<size_t>(i) * c + j] - lse[static_cast<size_t>(i)]);
          ln->grad[static_cast<size_t>(i) * c + j] += g * (p - (j == tg[static_cast<size_t>(i)] ? 1.0 : 0.0));
        }
      }
    };
  }
  return Tensor(out);
}

Tensor masked_fill(Tensor a, const std::vector<uint8_t>& mask, double fill_value) {
  if (static_cast<int>(mask.size()) != a.numel())
    throw ShapeError("masked_fill: mask length " + std::to_string(mask.size()) + " vs tensor " + shape_str(a.shape()));
  TensorNode* out = result_node(a, a.shape());
  out->value.resize(a.node()->value.size());
  for (int i = 0; i < a.numel(); ++i)
    out->value[static_cast<size_t>(i)] = mask[static_cast<size_t>(i)] ? fill_value : a.node()->value[static_cast<size_t>(i)];
  if (out->requires_grad) {
    TensorNode* an = a.node();
    TensorNode* on = out;
    std::vector<uint8_t> m = mask;
    out->backprop = [an, on, m]() {
      for (size_t i = 0; i < m.size(); ++i)
        if (!m[i]) an->grad[i] += on->grad[i];
    };
  }
  return Tensor(out);
}

Tensor gather_rows(Tensor a, const std::vector<int>& rows) {
  const Shape& s = a.shape();
  if (s.empty()) shape_fail("gather_rows", s);
  const int nrows = s[0];
  const int inner = shape_numel(s) / std::max(1, nrows);
  for (int r : rows)
    if (r < 0 || r >= nrows) throw ShapeError("gather_rows: row " + std::to_string(r) + " out of range [0," + std::to_string(nrows) + ")");
  Shape out_shape = s;
  out_shape[0] = static_cast<int>(rows.size());
  TensorNode* out = result_node(a, out_shape);
  out->value.resize(rows.size() * static_cast<size_t>(inner));
  for (size_t i = 0; i < rows.size(); ++i) {
    const double* src = a.node()->value.data() + static_cast<size_t>(rows[i]) * inner;
    std::copy(src, src + inner, out->value.data() + i * static_cast<size_t>(inner));
  }
  if (out->requires_grad) {
    TensorNode* an = a.node();
    TensorNode* on = out;
    std::vector<int> r = rows;
    out->backprop = [an, on, r, inner]() {
      for (size_t i = 0; i < r.size(); ++i) {
        const double* g = on->grad.data() + i * static_cast<size_t>(inner);
        double* dst = an->grad.data() + static_cast<size_t>(r[i]) * inner;
        for (int j = 0; j < inner; ++j) dst[j] += g[j];
      }
    };
  }
  return Tensor(out);
}

namespace {

void check_segments(const char* op, const std::vector<int>& segments, int rows, int num_segments) {
  if (static_cast<int>(segments.size()) != rows)
    throw ShapeError(std::string(op) + ": " + std::to_string(segments.size()) + " segment ids for " + std::to_string(rows) + " rows");
  for (int s : segments)
    if (s < 0 || s >= num_segments)
      throw ShapeError(std::string(op) + ": segment id " + std::to_string(s) + " out of range [0," + std::to_string(num_segments) + ")");
}

}  // namespace

Tensor segment_sum(Tensor a, const std::vector<int>& segments, int num_segments) {
  const Shape& s = a.shape();
  if (s.empty()) shape_fail("segment_sum", s);
  const int rows = s[0];
  const int inner = shape_numel(s) / std::max(1, rows);
  check_segments("segment_sum", segments, rows, num_segments);
  Shape out_shape = s;
  out_shape[0] = num_segments;
  TensorNode* out = result_node(a, out_shape);
  out->value.assign(static_cast<size_t>(num_segments) * inner, 0.0);
  for (int i = 0; i < rows; ++i) {
    const double* src = a.node()->value.data() + static_cast<size_t>(i) * inner;
    double* dst = out->value.data() + static_cast<size_t>(segments[static_cast<size_t>(i)]) * inner;
    for (int j = 0; j < inner; ++j) dst[j] += src[j];
  }
  if (out->requires_grad) {
    TensorNode* an = a.node();
    TensorNode* on = out;
    std::vector<int> seg = segments;
    out->backprop = [an, on, seg, inner]() {
      for (size_t i = 0; i < seg.size(); ++i) {
        const double* g = on->grad.data() + static_cast<size_t>(seg[i]) * inner;
        double* dst = an->grad.data() + i * static_cast<size_t>(inner);
        for (int j = 0; j < inner; ++j) dst[j] += g[j];
      }
    };
  }
  return Tensor(out);
}

Tensor segment_softmax(Tensor a, const std::vector<int>& segments, int num_segments) {
  const Shape& s = a.shape();
  if (s.empty() || s.size() > 2) shape_fail("segment_softmax", s);
  const int rows = s[0];
  const int cols = s.size() == 2 ? s[1] : 1;
  check_segments("segment_softmax", segments, rows, num_segments);
  TensorNode* out = result_node(a, s);
  out->value.resize(a.node()->value.size());
  const auto& av = a.node()->value;
  // per (segment, column): stable softmax over member rows
  std::vector<double> mx(static_cast<size_t>(num_segments) * cols, -HUGE_VAL);
  std::vector<double> denom(static_cast<size_t>(num_segments) * cols, 0.0);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      auto& m = mx[static_cast<size_t>(segments[static_cast<size_t>(i)]) * cols + j];
      m = std::max(m, av[static_cast<size_t>(i) * cols + j]);
    }
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      denom[static_cast<size_t>(segments[static_cast<size_t>(i)]) * cols + j] +=
          std::exp(av[static_cast<size_t>(i) * cols + j] - mx[static_cast<size_t>(segments[static_cast<size_t>(i)]) * cols + j]);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const size_t sj = static_cast<size_t>(segments[static_cast<size_t>(i)]) * cols + j;
      out->value[static_cast<size_t>(i) * cols + j] = std::exp(av[static_cast<size_t>(i) * cols + j] - mx[sj]) / denom[sj];
    }
  if (out->requires_grad) {
    TensorNode* an = a.node();
    TensorNode* on = out;
    std::vector<int> seg = segments;
    out->backprop = [an, on, seg, rows, cols, num_segments]() {
      std::vector<double> dot(static_cast<size_t>(num_segments) * cols, 0.0);
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
          dot[static_cast<size_t>(seg[static_cast<size_t>(i)]) * cols + j] +=
              on->grad[static_cast<size_t>(i) * cols + j] * on->value[static_cast<size_t>(i) * cols + j];
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
          const size_t sj = static_cast<size_t>(seg[static_cast<size_t>(i)]) * cols + j;
          an->grad[static_cast<size_t>(i) * cols + j] +=
              on->value[static_cast<size_t>(i) * cols + j] * (on->grad[static_cast<size_t>(i) * cols + j] - dot[sj]);
        }
    };
  }
  return Tensor(out);
}

Tensor scale_rows(Tensor a, Tensor s) {
  check_same_tape("scale_rows", a, s);
  const Shape& sa = a.shape();
  const Shape& ss = s.shape();
  if (sa.empty()) shape_fail("scale_rows", sa);
  const int rows = sa[0];
  const int inner = shape_numel(sa) / std::max(1, rows);
  const bool ok = (ss.size() == 1 && ss[0] == rows) || (ss.size() == 2 && ss[0] == rows && ss[1] == 1);
  if (!ok) shape_fail("scale_rows", sa, ss);
  TensorNode* out = result_node(a, s, sa);
  out->value.resize(a.node()->value.size());
  const auto& av = a.node()->value;
  const auto& sv = s.node()->value;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < inner; ++j)
      out->value[static_cast<size_t>(i) * inner + j] = av[static_cast<size_t>(i) * inner + j] * sv[static_cast<size_t>(i)];
  if (out->requires_grad) {
    TensorNode* an = a.node();
    TensorNode* sn = s.node();
    TensorNode* on = out;
    out->backprop = [an, sn, on, rows, inner]() {
      for (int i = 0; i < rows; ++i) {
        double acc = 0.0;
        for (int j = 0; j < inner; ++j) {
          const double g = on->grad[static_cast<size_t>(i) * inner + j];
          if (an->requires_grad) an->grad[static_cast<size_t>(i) * inner + j] += g * sn->value[static_cast<size_t>(i)];
          acc += g * an->value[static_cast<size_t>(i) * inner + j];
        }
        if (sn->requires_grad) sn->grad[static_cast<size_t>(i)] += acc;
      }
    };
  }
  return Tensor(out);
}

Tensor expand_cols(Tensor a, int repeat) {
  const Shape& s = a.shape();
  if (s.size() != 2 || repeat < 1) shape_fail("expand_cols", s);
  const int rows = s[0], cols = s[1];
  TensorNode* out = result_node(a, {rows, cols * repeat});
  out->value.resize(static_cast<size_t>(rows) * cols * repeat);
  const auto& av = a.node()->value;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const double v = av[static_cast<size_t>(i) * cols + j];
      double* dst = out->value.data() + (static_cast<size_t>(i) * cols + j) * repeat;
      for (int r = 0; r < repeat; ++r) dst[r] = v;
    }
  if (out->requires_grad) {
    TensorNode* an = a.node();
    TensorNode* on = out;
    out->backprop = [an, on, rows, cols, repeat]() {
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
          const double* g = on->grad.data() + (static_cast<size_t>(i) * cols + j) * repeat;
          double acc = 0.0;
          for (int r = 0; r < repeat; ++r) acc += g[r];
          an->grad[static_cast<size_t>(i) * cols + j] += acc;
        }
    };
  }
  return Tensor(out);
}

}  // namespace sigtraj
