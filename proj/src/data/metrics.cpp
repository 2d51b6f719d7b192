#include "gdpnet/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <unordered_map>

#include "gdpnet/errors.hpp"

namespace gdpnet::metrics {

PrecisionRecallF1 micro_f1(std::span<const std::uint32_t> predictions,
                           std::span<const std::uint32_t> golds,
                           std::optional<std::uint32_t> no_relation) {
  if (predictions.size() != golds.size()) throw DimensionError("micro_f1: length mismatch");
  const auto positive = [&](std::uint32_t c) { return !no_relation || c != *no_relation; };
  std::size_t correct = 0, predicted = 0, gold = 0;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    if (positive(predictions[i])) ++predicted;
    if (positive(golds[i])) ++gold;
    if (positive(predictions[i]) && predictions[i] == golds[i]) ++correct;
  }
  PrecisionRecallF1 out;
  out.precision = predicted ? static_cast<double>(correct) / static_cast<double>(predicted) : 0.0;
  out.recall = gold ? static_cast<double>(correct) / static_cast<double>(gold) : 0.0;
  const double denom = out.precision + out.recall;
  out.f1 = denom > 0.0 ? 2.0 * out.precision * out.recall / denom : 0.0;
  return out;
}

double accuracy(std::span<const std::uint32_t> predictions, std::span<const std::uint32_t> golds) {
  if (predictions.size() != golds.size()) throw DimensionError("accuracy: length mismatch");
  if (golds.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < golds.size(); ++i) hit += predictions[i] == golds[i];
  return static_cast<double>(hit) / static_cast<double>(golds.size());
}

std::optional<double> SelectionRow::percent() const {
  if (!available || total == 0) return std::nullopt;
  return 100.0 * static_cast<double>(selected) / static_cast<double>(total);
}

std::string SelectionTable::to_text() const {
  std::string out = "# token selection in the final pooled graph, counts pooled over the corpus\n";
  for (const SelectionRow* row : {&all, &non_repetitive, &repetitive, &trigger}) {
    char buf[128];
    if (const auto p = row->percent()) {
      std::snprintf(buf, sizeof buf, "%-15s %5.1f  (%zu/%zu)\n", row->name.c_str(), *p, row->selected,
                    row->total);
    } else {
      std::snprintf(buf, sizeof buf, "%-15s %5s\n", row->name.c_str(), "n/a");
    }
    out += buf;
  }
  return out;
}

SelectionTable selection_stats(std::span<const std::vector<std::size_t>> final_positions,
                               const data::Dataset& ds) {
  if (final_positions.size() != ds.examples.size()) {
    throw DimensionError("selection_stats: record count differs from dataset size");
  }
  SelectionTable table;
  bool any_mask = false;
  for (std::size_t e = 0; e < ds.examples.size(); ++e) {
    const auto& ex = ds.examples[e];
    const std::size_t t = ex.length();
    std::vector<bool> kept(t + 2, false);
    for (auto p : final_positions[e]) {
      if (p < kept.size()) kept[p] = true;
    }
    std::vector<bool> repeated;
    if (ex.token_strings) {
      std::unordered_map<std::string, std::size_t> counts;
      std::vector<std::string> lowered;
      for (const auto& s : *ex.token_strings) {
        std::string l = s;
        std::transform(l.begin(), l.end(), l.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        ++counts[l];
        lowered.push_back(std::move(l));
      }
      for (const auto& l : lowered) repeated.push_back(counts[l] >= 2);
    } else {
      table.non_repetitive.available = false;
      table.repetitive.available = false;
    }
    if (ex.trigger_mask) any_mask = true;
    for (std::size_t i = 0; i < t; ++i) {
      const bool k = kept[i + 1];
      ++table.all.total;
      table.all.selected += k;
      if (!repeated.empty()) {
        auto& row = repeated[i] ? table.repetitive : table.non_repetitive;
        ++row.total;
        row.selected += k;
      }
      if (ex.trigger_mask && (*ex.trigger_mask)[i]) {
        ++table.trigger.total;
        table.trigger.selected += k;
      }
    }
  }
  if (!any_mask) table.trigger.available = false;
  return table;
}

}  // namespace gdpnet::metrics
