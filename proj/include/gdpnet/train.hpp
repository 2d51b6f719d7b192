#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gdpnet/data.hpp"
#include "gdpnet/model.hpp"

namespace gdpnet::model {

/// One line of the metrics log.
struct EpochMetrics {
  std::size_t epoch = 0;
  std::string split;
  double loss = 0.0;
  double cse = 0.0;
  double dtw = 0.0;
  double f1 = 0.0;
  double mean_r_real = 0.0;
  double accuracy = 0.0;  // kept for early stopping, not part of the log line
};

inline constexpr const char* kMetricsHeader = "epoch,split,loss,cse,dtw,f1,mean_r_real";
std::string format_metrics(const EpochMetrics& m);

struct TrainOptions {
  // Stop after the first epoch whose dev accuracy reaches this value.
  std::optional<double> target_dev_accuracy;
  std::size_t eval_threads = 1;
  std::function<void(const EpochMetrics&)> on_epoch;
};

struct TrainResult {
  std::vector<EpochMetrics> log;
  std::size_t epochs_run = 0;
};

/// Seeded shuffled mini-batches, batch-averaged loss, one Adam step per
/// batch. Throws DivergenceError naming the example when a loss is not
/// finite; parameters are left as they were before that batch.
TrainResult train(Model& model, const data::Dataset& train_set, const data::Dataset* dev_set,
                  const TrainOptions& options = {});

struct Predictions {
  std::vector<std::uint32_t> labels;
  std::vector<std::vector<std::size_t>> final_positions;
  double loss = 0.0;  // dataset means
  double cse = 0.0;
  double dtw = 0.0;
  double mean_r_real = 0.0;
};

/// Evaluation-mode forward over every example. With threads > 1 the examples
/// are split across workers sharing the read-only parameters; results are
/// identical to the single-threaded run.
Predictions predict(const Model& model, const data::Dataset& ds, std::size_t threads = 1);

EpochMetrics summarize(std::size_t epoch, const data::Dataset& ds, const Predictions& p);

}  // namespace gdpnet::model
