#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "sigtraj/rng.hpp"
#include "sigtraj/tensor.hpp"

namespace testutil {

// Scalar-valued function of a flat input vector, used by the finite-difference
// oracle. Implementations rebuild the computation from scratch per call so the
// oracle stays independent of any recorded tape.
using ScalarFn = std::function<double(const std::vector<double>&)>;

struct GradCheckResult {
  double max_err = 0.0;       // max over components of |ad - fd| / scale
  int worst_index = -1;
  double ad_at_worst = 0.0;
  double fd_at_worst = 0.0;
  bool ok(double tol = 1e-4) const { return max_err <= tol; }
};

// Central finite differences at the given step. Error per component is
// |ad - fd| / max(|ad|, |fd|, floor): the floor makes near-zero gradients
// comparable (difference noise ~1e-10 at step 1e-5 on O(1) losses).
inline GradCheckResult finite_difference_check(const ScalarFn& f, std::vector<double> x,
                                               const std::vector<double>& analytic,
                                               double step = 1e-5, double floor = 1e-3) {
  GradCheckResult r;
  for (size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + step;
    const double fp = f(x);
    x[i] = keep - step;
    const double fm = f(x);
    x[i] = keep;
    const double fd = (fp - fm) / (2.0 * step);
    const double ad = analytic[i];
    const double err = std::fabs(ad - fd) / std::fmax(floor, std::fmax(std::fabs(ad), std::fabs(fd)));
    if (err > r.max_err) {
      r.max_err = err;
      r.worst_index = static_cast<int>(i);
      r.ad_at_worst = ad;
      r.fd_at_worst = fd;
    }
  }
  return r;
}

// Builds a scalar loss over a single differentiable input vector and checks
// the tape gradient against central differences.
inline GradCheckResult check_gradient(
    const std::function<sigtraj::Tensor(sigtraj::Tape&, sigtraj::Tensor)>& build,
    const std::vector<double>& x0, const sigtraj::Shape& shape, double step = 1e-5) {
  sigtraj::Tape tape;
  sigtraj::Tensor input = tape.leaf(shape, x0, true);
  sigtraj::Tensor loss = build(tape, input);
  tape.backward(loss);
  const std::vector<double> analytic = input.grad();
  ScalarFn f = [&build, &shape](const std::vector<double>& x) {
    sigtraj::Tape t;
    sigtraj::Tensor in = t.leaf(shape, x, false);
    return build(t, in).scalar();
  };
  return finite_difference_check(f, x0, analytic, step);
}

inline std::vector<double> random_vector(sigtraj::Rng& rng, int n, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(static_cast<size_t>(n));
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

inline bool approx_eq(double a, double b, double tol = 1e-9) { return std::fabs(a - b) <= tol; }

}  // namespace testutil
