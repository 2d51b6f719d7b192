#include "gdpnet/dtwpool.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gdpnet/errors.hpp"
#include "gdpnet/ops.hpp"

namespace gdpnet::pool {

Var sag_scores(const Var& adjacency, const Var& nodes, const Var& weight, const Var& bias) {
  if (adjacency.rows() != nodes.rows() || adjacency.cols() != nodes.rows()) {
    throw DimensionError("sag_scores: adjacency " + shape_string(adjacency.shape()) +
                         " does not match nodes " + shape_string(nodes.shape()));
  }
  const Var projected = ops::matmul(nodes, weight);  // T' x 1
  return ops::tanh(ops::add_row_bias(ops::matmul(adjacency, projected), bias));
}

std::size_t keep_count(std::size_t count, double ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0)) throw ArgumentError("pooling ratio must lie in (0, 1]");
  // The small slack keeps e.g. 0.7 * 10 from rounding up to 8.
  const double raw = std::ceil(ratio * static_cast<double>(count) - 1e-9);
  const auto k = static_cast<std::size_t>(std::max(raw, 1.0));
  return std::min(k, count);
}

std::vector<std::size_t> select_topk(std::span<const double> scores, double ratio) {
  const std::size_t k = keep_count(scores.size(), ratio);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

UnionSelection union_selection(const std::vector<std::vector<std::size_t>>& selections,
                               const std::vector<std::vector<double>>& scores,
                               std::size_t node_count) {
  if (selections.size() != scores.size()) {
    throw DimensionError("union_selection: selection and score view counts differ");
  }
  std::vector<int> best_view(node_count, -1);
  for (std::size_t n = 0; n < selections.size(); ++n) {
    for (auto i : selections[n]) {
      if (i >= node_count) throw IndexError("union_selection: node index out of range");
      if (best_view[i] < 0 || scores[n][i] > scores[static_cast<std::size_t>(best_view[i])][i]) {
        best_view[i] = static_cast<int>(n);
      }
    }
  }
  UnionSelection out;
  for (std::size_t i = 0; i < node_count; ++i) {
    if (best_view[i] < 0) continue;
    out.survivors.push_back(i);
    out.gate_source.emplace_back(i, static_cast<std::size_t>(best_view[i]));
  }
  if (out.survivors.empty()) throw std::logic_error("union_selection: empty union");
  out.realized_ratio = static_cast<double>(out.survivors.size()) / static_cast<double>(node_count);
  return out;
}

PoolResult dtw_pool(const std::vector<Var>& adjacency, const Var& nodes, const Var& weight,
                    const Var& bias, double ratio, std::vector<Var>* view_scores) {
  const std::size_t count = nodes.rows();
  std::vector<Var> columns;
  std::vector<std::vector<double>> scores;
  std::vector<std::vector<std::size_t>> selections;
  for (const auto& a : adjacency) {
    columns.push_back(sag_scores(a, nodes, weight, bias));
    const auto& v = columns.back().value().values();
    scores.emplace_back(v.begin(), v.end());
    selections.push_back(select_topk(scores.back(), ratio));
  }
  auto sel = union_selection(selections, scores, count);
  if (auto* log = nodes.tape().branch_log()) {
    // Survivors followed by their gate views.
    std::vector<std::size_t> flat = sel.survivors;
    for (const auto& gs : sel.gate_source) flat.push_back(gs.second);
    std::vector<std::size_t> size_tag{flat.size()};
    const std::size_t n = log->decide(size_tag).front();
    flat.resize(n);
    flat = log->decide(std::move(flat));
    sel.survivors.assign(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(n / 2));
    sel.gate_source.clear();
    for (std::size_t k = 0; k < n / 2; ++k) sel.gate_source.emplace_back(flat[k], flat[n / 2 + k]);
    sel.realized_ratio = static_cast<double>(n / 2) / static_cast<double>(count);
  }
  // Score matrix is T' x N, so gate_source (node, view) indexes it directly.
  const Var score_matrix = columns.size() == 1 ? columns.front() : ops::concat_cols(columns);
  const Var gate = ops::gather_elements(score_matrix, sel.gate_source);
  Var features = ops::scale_rows(ops::gather_rows(nodes, sel.survivors), gate);
  if (view_scores) *view_scores = std::move(columns);
  return PoolResult{features, std::move(sel)};
}

}  // namespace gdpnet::pool
