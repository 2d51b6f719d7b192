#include "gdpnet/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gdpnet/errors.hpp"

namespace gdpnet {
namespace {

double evaluate(const LossBuilder& loss, const ParamStore& store, BranchLog* log) {
  Tape tape;
  tape.set_branch_log(log);
  const double v = loss(tape, store).value().item();
  if (!std::isfinite(v)) throw NumericError("grad_check: loss is not finite");
  return v;
}

double shifted(const LossBuilder& loss, ParamStore& store, double& slot, double to, BranchLog* log) {
  const double original = slot;
  if (log) log->set_mode(BranchLog::Mode::Replay);
  slot = to;
  const double v = evaluate(loss, store, log);
  slot = original;
  return v;
}

double difference(const LossBuilder& loss, ParamStore& store, double& slot, const GradCheckOptions& o,
                  double h, BranchLog* log) {
  const double x = slot;
  const double up = shifted(loss, store, slot, x + h, log);
  const double down = shifted(loss, store, slot, x - h, log);
  if (!o.five_point) return (up - down) / (2.0 * h);
  const double up2 = shifted(loss, store, slot, x + 2.0 * h, log);
  const double down2 = shifted(loss, store, slot, x - 2.0 * h, log);
  return (8.0 * (up - down) - (up2 - down2)) / (12.0 * h);
}

constexpr int kMaxHalvings = 12;

double estimate(const LossBuilder& loss, ParamStore& store, double& slot, const GradCheckOptions& o,
                double base_loss, BranchLog* log) {
  double h = o.step;
  double prev = difference(loss, store, slot, o, h, log);
  if (!o.adaptive_step) return prev;
  double best = prev, best_gap = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kMaxHalvings; ++k) {
    h *= 0.5;
    const double next = difference(loss, store, slot, o, h, log);
    const double gap = std::abs(next - prev);
    const double noise = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(base_loss)) / h;
    if (gap <= noise) return prev;
    if (gap < best_gap) {
      best_gap = gap;
      best = next;
    } else {
      break;  // round-off has taken over
    }
    prev = next;
  }
  return best;
}

}  // namespace

GradCheckReport grad_check(const LossBuilder& loss, ParamStore& store, const GradCheckOptions& options) {
  if (!(options.step > 0.0) || !std::isfinite(options.step)) {
    throw ArgumentError("grad_check: step must be a positive finite number");
  }
  store.zero_grads();
  BranchLog log;
  BranchLog* replay = options.freeze_branches ? &log : nullptr;
  double base_loss = 0.0;
  {
    Tape tape;
    tape.set_branch_log(replay);
    const Var root = loss(tape, store);
    base_loss = root.value().item();
    if (!std::isfinite(base_loss)) throw NumericError("grad_check: loss is not finite");
    tape.backward(root);
    tape.accumulate_into(store);
  }

  GradCheckReport report;
  for (auto& e : store.entries()) {
    for (std::size_t i = 0; i < e.value.size(); ++i) {
      const double numeric = estimate(loss, store, e.value[i], options, base_loss, replay);
      const double analytic = e.grad[i];
      const double err =
          std::abs(analytic - numeric) / std::max(1e-8, std::abs(analytic) + std::abs(numeric));
      ++report.checked;
      if (err > report.max_rel_error || report.worst_param.empty()) {
        report.max_rel_error = std::max(err, report.max_rel_error);
        if (err >= report.max_rel_error) {
          report.worst_param = e.name;
          report.worst_index = i;
          report.worst_analytic = analytic;
          report.worst_numeric = numeric;
        }
      }
    }
  }
  store.zero_grads();
  return report;
}

}  // namespace gdpnet
