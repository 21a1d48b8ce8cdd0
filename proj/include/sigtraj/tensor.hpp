#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sigtraj {

using Shape = std::vector<int>;

struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int shape_numel(const Shape& s);
std::string shape_str(const Shape& s);

class Tape;

struct TensorNode {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // sized on first backward over this node
  bool requires_grad = false;
  std::function<void()> backprop;  // accumulates into parents' grad
  int index = 0;                   // creation order on the owning tape
  Tape* tape = nullptr;

  int numel() const { return static_cast<int>(value.size()); }
  void ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
  }
};

// Lightweight handle into a Tape-owned node. Valid while the tape lives.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(TensorNode* n) : node_(n) {}

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  int numel() const { return node_->numel(); }
  const std::vector<double>& values() const { return node_->value; }
  const std::vector<double>& grad() const { return node_->grad; }
  bool requires_grad() const { return node_->requires_grad; }
  double scalar() const {
    if (node_->numel() != 1) throw ShapeError("scalar() on tensor of shape " + shape_str(node_->shape));
    return node_->value[0];
  }
  double at(int i) const { return node_->value[static_cast<size_t>(i)]; }
  TensorNode* node() const { return node_; }

 private:
  TensorNode* node_ = nullptr;
};

// Records every primitive op in creation order; backward() replays the record
// in reverse so gradient accumulation order is fixed and runs are reproducible.
class Tape {
 public:
  Tensor leaf(Shape shape, std::vector<double> values, bool requires_grad = false);
  Tensor constant(Shape shape, std::vector<double> values) { return leaf(std::move(shape), std::move(values), false); }
  Tensor scalar_value(double v) { return leaf({1}, {v}, false); }
  Tensor zeros(Shape shape, bool requires_grad = false);

  // Seeds d(root)/d(root)=1 and sweeps the record in reverse creation order.
  // Repeated calls without zero_grad() accumulate gradients.
  void backward(const Tensor& root);
  void zero_grad();
  size_t size() const { return nodes_.size(); }

  TensorNode* make(Shape shape, size_t numel_hint, bool requires_grad);

 private:
  std::deque<TensorNode> nodes_;  // deque: stable addresses
};

// ---------------------------------------------------------------------------
// Primitive ops. Operands must live on the same tape. Shape errors name the
// op and offending shapes.
// ---------------------------------------------------------------------------

// add/sub/mul accept equal shapes, or b with a shape that is a suffix of a's
// (broadcast over the leading dims, as needed for bias terms).
Tensor add(Tensor a, Tensor b);
Tensor sub(Tensor a, Tensor b);
Tensor mul(Tensor a, Tensor b);
Tensor scale(Tensor a, double s);
Tensor matmul(Tensor a, Tensor b);  // [m,k] x [k,n]
Tensor concat(const std::vector<Tensor>& parts, int axis);
Tensor slice(Tensor a, int axis, int start, int len);
Tensor reshape(Tensor a, Shape shape);
Tensor sum(Tensor a, int axis);
Tensor mean(Tensor a, int axis);
Tensor sum_all(Tensor a);
Tensor mean_all(Tensor a);
Tensor sin(Tensor a);
Tensor leaky_relu(Tensor a, double slope);
Tensor softmax(Tensor a, int axis);
Tensor huber(Tensor a, double delta);  // elementwise Huber of a residual
// Per-row cross entropy from logits [n, C]; target index < 0 marks the row
// masked (output 0, no gradient).
Tensor cross_entropy(Tensor logits, const std::vector<int>& targets);
Tensor masked_fill(Tensor a, const std::vector<uint8_t>& mask, double fill_value);

// Graph/bookkeeping primitives used by the attention stack.
Tensor gather_rows(Tensor a, const std::vector<int>& rows);
Tensor segment_sum(Tensor a, const std::vector<int>& segments, int num_segments);
Tensor segment_softmax(Tensor a, const std::vector<int>& segments, int num_segments);
Tensor scale_rows(Tensor a, Tensor s);       // s: [m] or [m,1]
Tensor expand_cols(Tensor a, int repeat);    // [m,n] -> [m,n*repeat], blockwise

inline Tensor operator+(Tensor a, Tensor b) { return add(a, b); }
inline Tensor operator-(Tensor a, Tensor b) { return sub(a, b); }
inline Tensor operator*(Tensor a, Tensor b) { return mul(a, b); }

}  // namespace sigtraj
