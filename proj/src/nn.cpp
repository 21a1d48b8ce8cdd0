#include "sigtraj/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace sigtraj {

void ParamStore::add(const std::string& name, Shape shape, std::vector<double> value) {
  if (has(name)) throw std::logic_error("ParamStore: duplicate parameter name " + name);
  if (shape_numel(shape) != static_cast<int>(value.size()))
    throw ShapeError("ParamStore: data for " + name + " does not match shape " + shape_str(shape));
  index_[name] = static_cast<int>(order_.size());
  order_.push_back(name);
  entries_[name] = Entry{std::move(shape), std::move(value)};
}

ParamStore::Entry& ParamStore::at(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw std::out_of_range("ParamStore: unknown parameter " + name);
  return it->second;
}

const ParamStore::Entry& ParamStore::at(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw std::out_of_range("ParamStore: unknown parameter " + name);
  return it->second;
}

size_t ParamStore::total_values() const {
  size_t n = 0;
  for (const auto& name : order_) n += entries_.at(name).value.size();
  return n;
}

Tensor ParamBinder::operator()(const std::string& name) {
  auto it = bound_.find(name);
  if (it != bound_.end()) return it->second;
  const auto& e = store_.at(name);
  Tensor t = tape_.leaf(e.shape, e.value, requires_grad_);
  bound_.emplace(name, t);
  return t;
}

void ParamBinder::accumulate_grads(GradMap& grads) const {
  for (const auto& [name, tensor] : bound_) {
    const auto& g = tensor.node()->grad;
    if (g.empty()) continue;
    auto& dst = grads[name];
    if (dst.empty()) dst.assign(g.size(), 0.0);
    for (size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
  }
}

void init_linear(ParamStore& store, const std::string& prefix, int in_dim, int out_dim, Rng& rng) {
  const double limit = std::sqrt(6.0 / (in_dim + out_dim));
  std::vector<double> w(static_cast<size_t>(in_dim) * out_dim);
  for (auto& v : w) v = rng.uniform(-limit, limit);
  store.add(prefix + ".w", {in_dim, out_dim}, std::move(w));
  store.add(prefix + ".b", {out_dim}, std::vector<double>(static_cast<size_t>(out_dim), 0.0));
}

void init_vector(ParamStore& store, const std::string& name, int dim, Rng& rng, double scl) {
  std::vector<double> v(static_cast<size_t>(dim));
  for (auto& x : v) x = rng.uniform(-scl, scl);
  store.add(name, {dim}, std::move(v));
}

Tensor linear(ParamBinder& params, const std::string& prefix, Tensor x) {
  return add(matmul(x, params(prefix + ".w")), params(prefix + ".b"));
}

Tensor mlp2(ParamBinder& params, const std::string& prefix, Tensor x, double slope) {
  return linear(params, prefix + ".l2", leaky_relu(linear(params, prefix + ".l1", x), slope));
}

void init_mlp2(ParamStore& store, const std::string& prefix, int in_dim, int hidden_dim, int out_dim, Rng& rng) {
  init_linear(store, prefix + ".l1", in_dim, hidden_dim, rng);
  init_linear(store, prefix + ".l2", hidden_dim, out_dim, rng);
}

}  // namespace sigtraj
