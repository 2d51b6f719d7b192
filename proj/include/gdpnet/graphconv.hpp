#pragma once

// Multi-view densely connected graph convolution. Within one view, sub-layer
// l sees the concatenation of the block input and the outputs of sub-layers
// 1..l-1, and emits d/M features; the view output is the concatenation of
// all M sub-layer outputs. Views are fused by concatenation followed by a
// learned projection back to width d.

#include <cstddef>
#include <string>
#include <vector>

#include "gdpnet/param_store.hpp"
#include "gdpnet/random.hpp"
#include "gdpnet/tape.hpp"

namespace gdpnet::graph {

struct ConvBlockShape {
  std::size_t in_width = 0;
  std::size_t out_width = 0;  // d
  std::size_t sublayers = 2;  // M; must divide out_width
  std::size_t views = 1;      // N
};

// Throws ConfigError when out_width is not a multiple of sublayers.
void validate(const ConvBlockShape& shape);

/// Registers per-view sub-layer weights/biases and the merge projection
/// (N*d -> d, no bias) under `prefix`.
void add_conv_params(ParamStore& store, const std::string& prefix, const ConvBlockShape& shape,
                     Rng& rng);

/// One view: rho(A k W + b) per sub-layer with rho = ReLU.
Var dense_conv_view(const Var& adjacency, const Var& nodes, const ParamStore& store,
                    const std::string& prefix, std::size_t view, std::size_t sublayers);

/// ReLU(concat(view outputs) W_merge).
Var merge_views(const std::vector<Var>& view_outputs, const Var& merge_weight);

/// All views plus merge.
Var conv_block(const std::vector<Var>& adjacency, const Var& nodes, const ParamStore& store,
               const std::string& prefix, std::size_t sublayers);

}  // namespace gdpnet::graph
