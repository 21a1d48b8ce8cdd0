#include "sigtraj/optimizer.hpp"

#include <cmath>

namespace sigtraj {

void optimizer_step(ParamStore& params, const GradMap& grads, OptimizerState& state) {
  const OptimizerConfig& c = state.config;
  state.step_count += 1;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step_count));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step_count));
  for (const auto& name : params.names()) {
    auto git = grads.find(name);
    if (git == grads.end()) continue;
    auto& p = params.at(name);
    const auto& g = git->second;
    if (g.size() != p.value.size())
      throw ShapeError("optimizer_step: gradient size mismatch for " + name);
    auto& mom = state.moments[name];
    if (mom.m.size() != p.value.size()) {
      mom.m.assign(p.value.size(), 0.0);
      mom.v.assign(p.value.size(), 0.0);
    }
    for (size_t i = 0; i < p.value.size(); ++i) {
      mom.m[i] = c.beta1 * mom.m[i] + (1.0 - c.beta1) * g[i];
      mom.v[i] = c.beta2 * mom.v[i] + (1.0 - c.beta2) * g[i] * g[i];
      const double mhat = mom.m[i] / bc1;
      const double vhat = mom.v[i] / bc2;
      p.value[i] -= c.learning_rate * (mhat / (std::sqrt(vhat) + c.epsilon) + c.weight_decay * p.value[i]);
    }
  }
}

double clip_grad_norm(GradMap& grads, double max_norm) {
  double sq = 0.0;
  for (const auto& [name, g] : grads)
    for (double v : g) sq += v * v;
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm && norm > 0.0) {
    const double s = max_norm / norm;
    for (auto& [name, g] : grads)
      for (double& v : g) v *= s;
  }
  return norm;
}

}  // namespace sigtraj
