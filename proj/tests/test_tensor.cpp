#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "sigtraj/nn.hpp"
#include "sigtraj/optimizer.hpp"
#include "sigtraj/tensor.hpp"
#include "testutil.hpp"

using namespace sigtraj;
using testutil::check_gradient;
using testutil::random_vector;

TEST_CASE("softmax of a constant row is uniform") {
  Tape tape;
  Tensor x = tape.leaf({1, 3}, {0.0, 0.0, 0.0});
  Tensor y = softmax(x, 1);
  for (int i = 0; i < 3; ++i) CHECK(y.at(i) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("softmax rows sum to one") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Tape tape;
    Tensor x = tape.leaf({4, 7}, random_vector(rng, 28, -30.0, 30.0));
    Tensor y = softmax(x, 1);
    for (int r = 0; r < 4; ++r) {
      double s = 0.0;
      for (int c = 0; c < 7; ++c) s += y.at(r * 7 + c);
      CHECK(std::fabs(s - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("sin forward value") {
  Tape tape;
  Tensor y = sin(tape.leaf({1}, {0.5}));
  CHECK(y.scalar() == doctest::Approx(0.479426).epsilon(1e-6));
}

TEST_CASE("huber at zero residual has zero value and gradient") {
  Tape tape;
  Tensor x = tape.leaf({1}, {0.0}, true);
  Tensor y = huber(x, 1.0);
  tape.backward(y);
  CHECK(y.scalar() == 0.0);
  CHECK(x.grad()[0] == 0.0);
}

TEST_CASE("leaky_relu is continuous at zero") {
  Tape tape;
  Tensor a = leaky_relu(tape.leaf({3}, {-1e-12, 0.0, 1e-12}), 0.2);
  CHECK(std::fabs(a.at(0) - (-0.2e-12)) <= 1e-24);
  CHECK(a.at(1) == 0.0);
  CHECK(std::fabs(a.at(2) - 1e-12) <= 1e-24);
}

TEST_CASE("backward of sum is ones") {
  Tape tape;
  Tensor x = tape.leaf({5}, {1.0, 2.0, 3.0, 4.0, 5.0}, true);
  tape.backward(sum_all(x));
  for (double g : x.grad()) CHECK(g == 1.0);
}

TEST_CASE("mean(matmul) gradient matches finite differences at 1e-6") {
  Rng rng(3);
  for (int seed = 0; seed < 5; ++seed) {
    const auto b_data = random_vector(rng, 8);
    auto build = [&b_data](Tape& t, Tensor a) {
      Tensor b = t.leaf({4, 2}, b_data);
      return mean_all(matmul(a, b));
    };
    auto r = check_gradient(build, random_vector(rng, 12), {3, 4});
    CHECK(r.max_err <= 1e-6);
  }
}

namespace {

// One gradient check per primitive, each on random data.
void check_primitive(const char* name,
                     const std::function<Tensor(Tape&, Tensor)>& build, const Shape& shape,
                     Rng& rng, double lo = -1.0, double hi = 1.0) {
  CAPTURE(name);
  auto wrapped = [&build](Tape& t, Tensor x) { return sum_all(mul(build(t, x), build(t, x))); };
  auto r = check_gradient(wrapped, random_vector(rng, shape_numel(shape), lo, hi), shape);
  CHECK_MESSAGE(r.max_err <= 1e-4, name << ": max rel err " << r.max_err << " at component "
                                        << r.worst_index << " (ad " << r.ad_at_worst << " fd "
                                        << r.fd_at_worst << ")");
}

}  // namespace

TEST_CASE("every primitive passes the finite-difference oracle on 5 seeds") {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    check_primitive("add", [](Tape& t, Tensor x) { return add(x, t.leaf({2, 6}, {1, 2, 3, 4, 5, 6, -1, -2, -3, -4, -5, -6})); }, {2, 6}, rng);
    check_primitive("add_broadcast", [](Tape& t, Tensor x) { return add(x, t.leaf({6}, {1, -1, 2, -2, 3, -3})); }, {2, 6}, rng);
    check_primitive("sub", [](Tape& t, Tensor x) { return sub(t.leaf({2, 6}, std::vector<double>(12, 0.5)), x); }, {2, 6}, rng);
    check_primitive("scale", [](Tape&, Tensor x) { return scale(x, -2.5); }, {3, 4}, rng);
    check_primitive("mul", [](Tape& t, Tensor x) { return mul(x, t.leaf({12}, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12})); }, {12}, rng);
    check_primitive("matmul_lhs", [](Tape& t, Tensor x) { return matmul(x, t.leaf({4, 3}, {1, 0, 2, -1, 3, 1, 0.5, 2, -2, 1, 1, 0})); }, {2, 4}, rng);
    check_primitive("matmul_rhs", [](Tape& t, Tensor x) { return matmul(t.leaf({3, 2}, {1, 2, -1, 0.5, 3, -2}), x); }, {2, 4}, rng);
    check_primitive("concat", [](Tape& t, Tensor x) {
      Tensor other = t.leaf({2, 2}, {9, 8, 7, 6});
      return concat({x, other, x}, 1);
    }, {2, 3}, rng);
    check_primitive("slice", [](Tape&, Tensor x) { return slice(x, 1, 1, 2); }, {3, 4}, rng);
    check_primitive("reshape", [](Tape&, Tensor x) { return reshape(x, {6, 2}); }, {3, 4}, rng);
    check_primitive("sum_axis", [](Tape&, Tensor x) { return sum(x, 1); }, {3, 4}, rng);
    check_primitive("mean_axis", [](Tape&, Tensor x) { return mean(x, 0); }, {3, 4}, rng);
    check_primitive("sin", [](Tape&, Tensor x) { return sin(x); }, {5}, rng, -3.0, 3.0);
    check_primitive("leaky_relu", [](Tape&, Tensor x) { return leaky_relu(x, 0.2); }, {9}, rng);
    check_primitive("softmax", [](Tape&, Tensor x) { return softmax(x, 1); }, {3, 5}, rng, -2.0, 2.0);
    check_primitive("huber", [](Tape&, Tensor x) { return huber(x, 1.0); }, {7}, rng, -3.0, 3.0);
    check_primitive("cross_entropy", [](Tape&, Tensor x) { return cross_entropy(x, {2, 0, -1}); }, {3, 4}, rng, -2.0, 2.0);
    check_primitive("masked_fill", [](Tape&, Tensor x) {
      return masked_fill(x, {1, 0, 0, 1, 0, 1}, -4.0);
    }, {6}, rng);
    check_primitive("gather_rows", [](Tape&, Tensor x) { return gather_rows(x, {2, 0, 2, 1}); }, {3, 3}, rng);
    check_primitive("segment_sum", [](Tape&, Tensor x) { return segment_sum(x, {0, 1, 0, 2, 1}, 3); }, {5, 2}, rng);
    check_primitive("segment_softmax", [](Tape&, Tensor x) { return segment_softmax(x, {0, 1, 0, 2, 1}, 3); }, {5, 2}, rng, -2.0, 2.0);
    check_primitive("scale_rows", [](Tape& t, Tensor x) { return scale_rows(x, t.leaf({4}, {0.5, -1.5, 2.0, 1.0})); }, {4, 3}, rng);
    check_primitive("scale_rows_by", [](Tape& t, Tensor x) {
      return scale_rows(t.leaf({4, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}), reshape(x, {4}));
    }, {4}, rng);
    check_primitive("expand_cols", [](Tape&, Tensor x) { return expand_cols(x, 3); }, {2, 4}, rng);
  }
}

TEST_CASE("huber gradient clamps outside delta") {
  Tape tape;
  Tensor x = tape.leaf({2}, {3.0, -2.5}, true);
  tape.backward(sum_all(huber(x, 1.0)));
  CHECK(x.grad()[0] == doctest::Approx(1.0));
  CHECK(x.grad()[1] == doctest::Approx(-1.0));
}

TEST_CASE("cross entropy masked rows produce zero loss and gradient") {
  Tape tape;
  Tensor logits = tape.leaf({2, 3}, {5.0, 1.0, -2.0, 0.3, 0.1, 0.2}, true);
  Tensor ce = cross_entropy(logits, {0, -1});
  CHECK(ce.at(1) == 0.0);
  tape.backward(sum_all(ce));
  for (int j = 3; j < 6; ++j) CHECK(logits.grad()[static_cast<size_t>(j)] == 0.0);
}

TEST_CASE("non-scalar backward root is rejected") {
  Tape tape;
  Tensor x = tape.leaf({2}, {1.0, 2.0}, true);
  CHECK_THROWS_AS(tape.backward(x), ShapeError);
}

TEST_CASE("shape mismatches raise structured errors naming the op") {
  Tape tape;
  Tensor a = tape.leaf({2, 3}, std::vector<double>(6, 0.0));
  Tensor b = tape.leaf({4}, std::vector<double>(4, 0.0));
  CHECK_THROWS_WITH_AS(add(a, b), doctest::Contains("add"), ShapeError);
  CHECK_THROWS_WITH_AS(matmul(a, b), doctest::Contains("matmul"), ShapeError);
}

TEST_CASE("repeated backward calls accumulate") {
  Tape tape;
  Tensor x = tape.leaf({1}, {2.0}, true);
  Tensor y = scale(x, 3.0);
  tape.backward(y);
  tape.backward(y);
  CHECK(x.grad()[0] == doctest::Approx(6.0));
  tape.zero_grad();
  tape.backward(y);
  CHECK(x.grad()[0] == doctest::Approx(3.0));
}

TEST_CASE("forward and backward are deterministic for a fixed seed") {
  auto run = [](uint64_t seed) {
    Rng rng(seed);
    Tape tape;
    Tensor a = tape.leaf({4, 4}, random_vector(rng, 16), true);
    Tensor b = tape.leaf({4, 4}, random_vector(rng, 16), true);
    Tensor loss = mean_all(mul(softmax(matmul(a, b), 1), leaky_relu(sub(a, b), 0.2)));
    tape.backward(loss);
    std::vector<double> out = {loss.scalar()};
    out.insert(out.end(), a.grad().begin(), a.grad().end());
    return out;
  };
  const auto r1 = run(42);
  const auto r2 = run(42);
  CHECK(r1 == r2);  // bit-identical
}

TEST_CASE("optimizer: zero gradient and zero decay leave parameters unchanged") {
  ParamStore store;
  store.add("p", {3}, {1.0, -2.0, 0.5});
  OptimizerState state;
  state.config.weight_decay = 0.0;
  GradMap grads;
  grads["p"] = {0.0, 0.0, 0.0};
  optimizer_step(store, grads, state);
  CHECK(store.at("p").value == std::vector<double>{1.0, -2.0, 0.5});
  CHECK(state.step_count == 1);
}

TEST_CASE("optimizer: parameter moves against the gradient sign") {
  ParamStore store;
  store.add("p", {1}, {0.0});
  OptimizerState state;
  state.config.weight_decay = 0.0;
  GradMap grads;
  grads["p"] = {1.5};
  for (int i = 0; i < 10; ++i) optimizer_step(store, grads, state);
  CHECK(store.at("p").value[0] < 0.0);
}

TEST_CASE("optimizer: quadratic bowl converges") {
  ParamStore store;
  store.add("p", {1}, {2.0});
  OptimizerState state;
  state.config.learning_rate = 1e-2;
  state.config.weight_decay = 0.0;
  for (int i = 0; i < 500; ++i) {
    GradMap grads;
    grads["p"] = {2.0 * (store.at("p").value[0] - 3.0)};
    optimizer_step(store, grads, state);
  }
  CHECK(std::fabs(store.at("p").value[0] - 3.0) < 1e-2);
}

TEST_CASE("gradient clipping caps the global norm") {
  GradMap grads;
  grads["a"] = {3.0, 4.0};  // norm 5
  const double pre = clip_grad_norm(grads, 1.0);
  CHECK(pre == doctest::Approx(5.0));
  CHECK(grads["a"][0] == doctest::Approx(0.6));
  CHECK(grads["a"][1] == doctest::Approx(0.8));
}

TEST_CASE("param binder reuses one leaf per name and collects grads") {
  ParamStore store;
  Rng rng(7);
  init_linear(store, "lin", 3, 2, rng);
  Tape tape;
  ParamBinder params(tape, store);
  Tensor x = tape.leaf({1, 3}, {0.3, -0.2, 0.9});
  Tensor y1 = linear(params, "lin", x);
  Tensor y2 = linear(params, "lin", x);
  tape.backward(sum_all(add(y1, y2)));
  GradMap grads;
  params.accumulate_grads(grads);
  CHECK(grads.count("lin.w") == 1);
  CHECK(grads.count("lin.b") == 1);
  CHECK(grads["lin.b"] == std::vector<double>{2.0, 2.0});
}
