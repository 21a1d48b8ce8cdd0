#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sigtraj/rng.hpp"
#include "sigtraj/tensor.hpp"

namespace sigtraj {

// Named parameter arrays. Registration order is fixed so initialization and
// optimizer sweeps are reproducible.
class ParamStore {
 public:
  struct Entry {
    Shape shape;
    std::vector<double> value;
  };

  void add(const std::string& name, Shape shape, std::vector<double> value);
  bool has(const std::string& name) const { return index_.count(name) > 0; }
  Entry& at(const std::string& name);
  const Entry& at(const std::string& name) const;
  const std::vector<std::string>& names() const { return order_; }
  size_t total_values() const;

 private:
  std::vector<std::string> order_;
  std::map<std::string, Entry> entries_;
  std::map<std::string, int> index_;
};

using GradMap = std::map<std::string, std::vector<double>>;

// Binds store entries onto a tape as differentiable leaves, one leaf per name.
class ParamBinder {
 public:
  ParamBinder(Tape& tape, const ParamStore& store, bool requires_grad = true)
      : tape_(tape), store_(store), requires_grad_(requires_grad) {}

  Tensor operator()(const std::string& name);

  // Collects d(loss)/d(param) for every bound parameter after backward().
  void accumulate_grads(GradMap& grads) const;

 private:
  Tape& tape_;
  const ParamStore& store_;
  bool requires_grad_;
  std::map<std::string, Tensor> bound_;
};

// Xavier-uniform weight + zero bias registered as <prefix>.w / <prefix>.b.
void init_linear(ParamStore& store, const std::string& prefix, int in_dim, int out_dim, Rng& rng);
void init_vector(ParamStore& store, const std::string& name, int dim, Rng& rng, double scl = 0.1);

Tensor linear(ParamBinder& params, const std::string& prefix, Tensor x);
// Two-layer MLP <prefix>.l1 / <prefix>.l2 with leaky-relu in between.
Tensor mlp2(ParamBinder& params, const std::string& prefix, Tensor x, double slope = 0.2);
void init_mlp2(ParamStore& store, const std::string& prefix, int in_dim, int hidden_dim, int out_dim, Rng& rng);

}  // namespace sigtraj
