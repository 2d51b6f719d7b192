#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gdpnet/dense_array.hpp"

namespace gdpnet {

class Tape;
class ParamStore;

/// Discrete choices made by non-smooth ops (ReLU masks, max rows, top-k
/// picks) in one forward pass, in call order. Recording them once and
/// replaying them pins the branch, so finite differences of a piecewise
/// smooth loss see only the piece the analytic gradient belongs to.
class BranchLog {
 public:
  enum class Mode { Record, Replay };

  void set_mode(Mode m) noexcept {
    mode_ = m;
    cursor_ = 0;
  }
  Mode mode() const noexcept { return mode_; }
  std::size_t size() const noexcept { return choices_.size(); }

  // Record: stores and returns `choice`. Replay: returns the next stored
  // choice; logic_error when the pass makes a different sequence of calls.
  std::vector<std::size_t> decide(std::vector<std::size_t> choice);

 private:
  Mode mode_ = Mode::Record;
  std::vector<std::vector<std::size_t>> choices_;
  std::size_t cursor_ = 0;
};

/// Handle to a value recorded on a Tape. Cheap to copy; valid as long as the
/// tape that produced it.
class Var {
 public:
  Var() = default;

  const DenseArray& value() const;
  const DenseArray::Shape& shape() const { return value().shape(); }
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  bool requires_grad() const;
  Tape& tape() const { return *tape_; }
  std::size_t id() const noexcept { return id_; }
  bool valid() const noexcept { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Per-forward-pass record of values and backward closures. Not thread-safe;
/// use one tape per example. Parameter leaves reference the store's values
/// without copying, so the store must outlive the tape and stay unmodified
/// until backward() and accumulate_into() are done.
class Tape {
 public:
  // Receives the gradient flowing into the node's output.
  using Backward = std::function<void(Tape&, const DenseArray& out_grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(DenseArray value);
  Var param(const ParamStore& store, const std::string& name);
  Var record(DenseArray value, bool requires_grad, Backward backward);

  const DenseArray& value(const Var& v) const { return node_value(nodes_[v.id()]); }
  bool requires_grad(const Var& v) const { return nodes_[v.id()].requires_grad; }
  // Gradient buffer for v, zero-initialized on first access.
  DenseArray& grad(const Var& v);
  const DenseArray* grad_if_any(const Var& v) const;

  // Seeds d(root)/d(root) = 1 and runs every backward closure in reverse
  // order. root must hold exactly one value.
  void backward(const Var& root);

  // Adds scale * gradient of each bound parameter into store's grad arrays.
  void accumulate_into(ParamStore& store, double scale = 1.0) const;

  std::size_t size() const noexcept { return nodes_.size(); }

  // Optional; non-smooth ops consult it when set. Not owned.
  void set_branch_log(BranchLog* log) noexcept { branches_ = log; }
  BranchLog* branch_log() const noexcept { return branches_; }

 private:
  struct Node {
    DenseArray owned;
    const DenseArray* external = nullptr;
    bool requires_grad = false;
    bool has_grad = false;
    DenseArray grad;
    Backward backward;
  };
  static const DenseArray& node_value(const Node& n) { return n.external ? *n.external : n.owned; }

  std::deque<Node> nodes_;
  BranchLog* branches_ = nullptr;
  std::vector<std::pair<std::string, std::size_t>> params_;
  std::unordered_map<std::string, std::size_t> param_ids_;
};

inline const DenseArray& Var::value() const { return tape_->value(*this); }
inline bool Var::requires_grad() const { return tape_->requires_grad(*this); }

namespace testing {
// Scales every bias gradient by (1 + factor). Zero in normal operation; a
// nonzero value exists only so the gradient checker can be shown to fail.
void set_backward_perturbation(double factor) noexcept;
double backward_perturbation() noexcept;
}  // namespace testing

}  // namespace gdpnet
