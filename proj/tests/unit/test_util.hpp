#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "gdpnet/dense_array.hpp"
#include "gdpnet/ops.hpp"
#include "gdpnet/random.hpp"
#include "gdpnet/tape.hpp"

namespace gdpnet::test {

inline DenseArray random_array(DenseArray::Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  DenseArray a(std::move(shape));
  for (auto& v : a.values()) v = rng.uniform(lo, hi);
  return a;
}

inline double rel_error(double a, double n) {
  return std::abs(a - n) / std::max(1e-8, std::abs(a) + std::abs(n));
}

// Builds a scalar from one or more leaf inputs on a fresh tape.
using ScalarFn = std::function<Var(Tape&, const std::vector<Var>&)>;

// Max relative error between reverse-mode and central-difference gradients
// of f with respect to every coordinate of every input.
inline double max_grad_error(const ScalarFn& f, std::vector<DenseArray> inputs, double step = 1e-5) {
  std::vector<DenseArray> analytic;
  {
    Tape tape;
    std::vector<Var> leaves;
    for (const auto& in : inputs) leaves.push_back(tape.record(in, true, nullptr));
    const Var out = f(tape, leaves);
    tape.backward(out);
    for (const auto& l : leaves) {
      const auto* g = tape.grad_if_any(l);
      analytic.push_back(g ? *g : DenseArray(l.shape()));
    }
  }
  const auto eval = [&] {
    Tape tape;
    std::vector<Var> leaves;
    for (const auto& in : inputs) leaves.push_back(tape.constant(in));
    return f(tape, leaves).value().item();
  };
  double worst = 0.0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    for (std::size_t i = 0; i < inputs[k].size(); ++i) {
      const double saved = inputs[k][i];
      inputs[k][i] = saved + step;
      const double up = eval();
      inputs[k][i] = saved - step;
      const double down = eval();
      inputs[k][i] = saved;
      worst = std::max(worst, rel_error(analytic[k][i], (up - down) / (2.0 * step)));
    }
  }
  return worst;
}

// Weighted sum with fixed random weights, so that every output coordinate
// carries a distinct gradient.
inline Var weighted_sum(const Var& x, std::uint64_t seed = 99) {
  Rng rng(seed);
  DenseArray w(x.shape());
  for (auto& v : w.values()) v = rng.uniform(0.5, 1.5);
  return ops::sum(ops::mul_constant(x, w));
}

}  // namespace gdpnet::test
