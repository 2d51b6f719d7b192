#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gdpnet/data.hpp"

namespace gdpnet::metrics {

struct PrecisionRecallF1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Micro-averaged over every class except no_relation (when given). A
/// correct positive is a prediction equal to a positive gold label; 0/0
/// counts as 0.
PrecisionRecallF1 micro_f1(std::span<const std::uint32_t> predictions,
                           std::span<const std::uint32_t> golds,
                           std::optional<std::uint32_t> no_relation);

double accuracy(std::span<const std::uint32_t> predictions, std::span<const std::uint32_t> golds);

struct SelectionRow {
  std::string name;
  bool available = true;  // false when the dataset lacks the needed annotation
  std::size_t selected = 0;
  std::size_t total = 0;

  // Percentage, or nullopt when unavailable or the denominator is zero.
  std::optional<double> percent() const;
};

/// Share of token positions that survive to the final pooled graph, pooled
/// over the whole corpus (not averaged per sequence).
struct SelectionTable {
  SelectionRow all{"all"};
  SelectionRow non_repetitive{"non_repetitive"};
  SelectionRow repetitive{"repetitive"};
  SelectionRow trigger{"trigger"};

  std::string to_text() const;
};

/// final_positions[e] lists the original positions (1-based; T+1 is SEP)
/// that survive in example e. Repetition compares lowercased surface forms
/// within one sequence.
SelectionTable selection_stats(std::span<const std::vector<std::size_t>> final_positions,
                               const data::Dataset& ds);

}  // namespace gdpnet::metrics
