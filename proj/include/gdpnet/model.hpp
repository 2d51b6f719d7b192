#pragma once

// The full graph module: latent edges over the token nodes, D alternations of
// multi-view convolution and union pooling, a readout over every stage's
// pooled features, and a softmax classifier on [h0 ; readout].

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gdpnet/data.hpp"
#include "gdpnet/gaussian_graph.hpp"
#include "gdpnet/param_store.hpp"
#include "gdpnet/random.hpp"
#include "gdpnet/tape.hpp"

namespace gdpnet::model {

struct ModelConfig {
  std::size_t input_width = 768;    // d_in of the embedding rows
  std::size_t node_width = 300;     // d
  std::size_t gaussian_width = 64;  // g
  std::size_t views = 3;            // N
  std::size_t sublayers = 2;        // M
  std::size_t stages = 3;           // D; 0 disables pooling
  double ratio = 0.7;               // per-view keep ratio r
  double gamma = 1.0;
  double dtw_weight = 1e-6;  // lambda
  std::size_t classes = 2;
  double dropout = 0.5;
  double learning_rate = 3e-5;
  std::size_t batch_size = 24;
  std::size_t epochs = 20;
  std::uint64_t seed = 1;
  graph::AdjacencyNorm adjacency_norm = graph::AdjacencyNorm::Softmax;
  bool regenerate_edges = false;
  bool attention_edges = false;
  bool trainable_cls = false;
  bool per_stage_pool = false;

  // ConfigError naming the offending field.
  void validate() const;
};

ModelConfig dialogre_profile();
ModelConfig tacred_profile();

struct StageTrace {
  std::vector<std::size_t> positions;  // original positions, ascending
  double realized_ratio = 1.0;
  Var features;  // pooled, gated survivor features
};

struct ForwardRecord {
  Var logits;   // 1 x |R|
  Var h_final;  // 1 x (d_in + d)
  Var v1;       // first convolution output over all nodes
  std::vector<std::size_t> node_positions;  // 1..T+1
  std::vector<StageTrace> stages;

  const std::vector<std::size_t>& final_positions() const;
  double mean_realized_ratio() const;
};

struct LossTerms {
  Var total;
  double cse = 0.0;
  double dtw = 0.0;  // computed even when lambda is 0
};

class Model {
 public:
  explicit Model(ModelConfig config);

  const ModelConfig& config() const noexcept { return config_; }
  ParamStore& params() noexcept { return params_; }
  const ParamStore& params() const noexcept { return params_; }

  /// Records the forward pass on `tape`. Dropout is active only when
  /// train is set, and then draws its masks from dropout_rng (may be null
  /// when dropout is 0). Safe to call concurrently on distinct tapes.
  ForwardRecord forward(Tape& tape, const data::TokenSequence& example, bool train,
                        Rng* dropout_rng = nullptr) const;

  LossTerms loss(const ForwardRecord& record, std::uint32_t label) const;

 private:
  std::string pool_prefix(std::size_t stage) const;

  ModelConfig config_;
  ParamStore params_;
};

std::size_t argmax(std::span<const double> logits);

}  // namespace gdpnet::model
