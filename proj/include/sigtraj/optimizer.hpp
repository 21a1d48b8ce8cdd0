#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sigtraj/nn.hpp"

namespace sigtraj {

struct OptimizerConfig {
  double learning_rate = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 1e-4;  // decoupled, applied to the parameter directly
};

// Adaptive-moment state with decoupled weight decay (AdamW-style update).
struct OptimizerState {
  struct Moments {
    std::vector<double> m;
    std::vector<double> v;
  };
  std::map<std::string, Moments> moments;
  int64_t step_count = 0;
  OptimizerConfig config;
};

// One decoupled-weight-decay adaptive-moment update over every named gradient.
// Parameters without a gradient entry are left untouched (decay included).
void optimizer_step(ParamStore& params, const GradMap& grads, OptimizerState& state);

// Scales gradients in place so their global L2 norm is at most max_norm.
// Returns the pre-clip norm. max_norm <= 0 disables clipping.
double clip_grad_norm(GradMap& grads, double max_norm);

}  // namespace sigtraj
