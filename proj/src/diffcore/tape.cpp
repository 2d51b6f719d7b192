#include "gdpnet/tape.hpp"

#include <atomic>
#include <stdexcept>

#include "gdpnet/errors.hpp"
#include "gdpnet/param_store.hpp"

namespace gdpnet {

Var Tape::constant(DenseArray value) {
  Node n;
  n.owned = std::move(value);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Tape::param(const ParamStore& store, const std::string& name) {
  if (auto it = param_ids_.find(name); it != param_ids_.end()) return Var(this, it->second);
  Node n;
  n.external = &store.at(name).value;
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  const auto id = nodes_.size() - 1;
  param_ids_.emplace(name, id);
  params_.emplace_back(name, id);
  return Var(this, id);
}

Var Tape::record(DenseArray value, bool requires_grad, Backward backward) {
  Node n;
  n.owned = std::move(value);
  n.requires_grad = requires_grad;
  if (requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

DenseArray& Tape::grad(const Var& v) {
  Node& n = nodes_[v.id()];
  if (!n.has_grad) {
    n.grad = DenseArray(node_value(n).shape());
    n.has_grad = true;
  }
  return n.grad;
}

const DenseArray* Tape::grad_if_any(const Var& v) const {
  const Node& n = nodes_[v.id()];
  return n.has_grad ? &n.grad : nullptr;
}

void Tape::backward(const Var& root) {
  if (root.value().size() != 1) {
    throw DimensionError("backward() needs a scalar root, got shape " +
                         shape_string(root.value().shape()));
  }
  grad(root).fill(1.0);
  for (std::size_t i = root.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.has_grad || !n.backward) continue;
    n.backward(*this, n.grad);
  }
}

void Tape::accumulate_into(ParamStore& store, double scale) const {
  for (const auto& [name, id] : params_) {
    const Node& n = nodes_[id];
    if (!n.has_grad) continue;
    auto& g = store.at(name).grad;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += scale * n.grad[i];
  }
}

std::vector<std::size_t> BranchLog::decide(std::vector<std::size_t> choice) {
  if (mode_ == Mode::Record) {
    choices_.push_back(choice);
    return choice;
  }
  if (cursor_ >= choices_.size() || choices_[cursor_].size() != choice.size()) {
    throw std::logic_error("branch log replay does not match the recorded pass");
  }
  return choices_[cursor_++];
}

namespace testing {
namespace {
std::atomic<double> g_perturbation{0.0};
}
void set_backward_perturbation(double factor) noexcept { g_perturbation.store(factor); }
double backward_perturbation() noexcept { return g_perturbation.load(std::memory_order_relaxed); }
}  // namespace testing

}  // namespace gdpnet
