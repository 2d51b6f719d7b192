#pragma once

// Multi-view top-k pooling. Each view scores nodes with a one-hop attention
// readout, keeps its ceil(r * T') best nodes, and the pooled graph keeps the
// union of all views' selections. The realized ratio therefore floats in
// [r, 1] instead of being fixed.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "gdpnet/tape.hpp"

namespace gdpnet::pool {

/// tanh(A (V w) + b), one score per node as a T' x 1 column.
Var sag_scores(const Var& adjacency, const Var& nodes, const Var& weight, const Var& bias);

/// Number of nodes each view keeps: ceil(ratio * count), at least 1.
std::size_t keep_count(std::size_t count, double ratio);

/// Indices of the keep_count largest scores, ascending. Ties go to the
/// smaller index. ArgumentError unless ratio is in (0, 1].
std::vector<std::size_t> select_topk(std::span<const double> scores, double ratio);

/// Cross-view union of selections.
struct UnionSelection {
  std::vector<std::size_t> survivors;  // ascending local indices
  // For each survivor: (node, view) of the highest score among the views
  // that selected it. Used to gate the survivor's features.
  std::vector<std::pair<std::size_t, std::size_t>> gate_source;
  double realized_ratio = 0.0;
};

/// scores[n][i] is view n's score of node i.
UnionSelection union_selection(const std::vector<std::vector<std::size_t>>& selections,
                               const std::vector<std::vector<double>>& scores,
                               std::size_t node_count);

struct PoolResult {
  Var features;  // survivors x d, each row scaled by its gate score
  UnionSelection selection;
};

/// Scores every view, selects, unions, and gathers gated survivor features.
/// view_scores receives the per-view score columns when non-null.
PoolResult dtw_pool(const std::vector<Var>& adjacency, const Var& nodes, const Var& weight,
                    const Var& bias, double ratio, std::vector<Var>* view_scores = nullptr);

}  // namespace gdpnet::pool
