#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "gdpnet/param_store.hpp"
#include "gdpnet/tape.hpp"

namespace gdpnet {

// Builds a scalar loss on the given tape from the store's current values.
// Must be deterministic: the checker calls it 2P + 1 times.
using LossBuilder = std::function<Var(Tape&, const ParamStore&)>;

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

struct GradCheckOptions {
  double step = 1e-5;
  // Finite-difference evaluations replay the ReLU / max / top-k decisions of
  // the analytic pass, so a kink inside [x - step, x + step] cannot spoil
  // the difference.
  bool freeze_branches = false;
  // (f(x-2h) - 8 f(x-h) + 8 f(x+h) - f(x+2h)) / 12h instead of the
  // three-point difference; truncation error O(h^4), which allows a step
  // large enough to keep round-off far below tiny gradients.
  bool five_point = false;
  // Per coordinate, halve the step (up to 12 times) until two successive
  // estimates agree to within the loss round-off. Coordinates whose higher
  // derivatives are large then get a step small enough for them, the rest
  // keep the configured one.
  bool adaptive_step = false;
};

/// Compares reverse-mode gradients against central differences for every
/// scalar in the store. Error per coordinate is |a - n| / max(1e-8, |a| + |n|).
/// Leaves store values untouched and its gradients zeroed on return.
GradCheckReport grad_check(const LossBuilder& loss, ParamStore& store, const GradCheckOptions& options);
inline GradCheckReport grad_check(const LossBuilder& loss, ParamStore& store, double step) {
  return grad_check(loss, store, GradCheckOptions{step});
}

}  // namespace gdpnet
