#include "gdpnet/graphconv.hpp"

#include "gdpnet/errors.hpp"
#include "gdpnet/ops.hpp"

namespace gdpnet::graph {
namespace {

std::string layer_prefix(const std::string& prefix, std::size_t view, std::size_t layer) {
  return prefix + ".view" + std::to_string(view) + ".layer" + std::to_string(layer);
}

}  // namespace

void validate(const ConvBlockShape& shape) {
  if (shape.sublayers == 0 || shape.views == 0 || shape.out_width == 0 || shape.in_width == 0) {
    throw ConfigError("graph convolution needs positive widths, views and sub-layers");
  }
  if (shape.out_width % shape.sublayers != 0) {
    throw ConfigError("node width " + std::to_string(shape.out_width) +
                      " is not divisible by sub-layer count " + std::to_string(shape.sublayers));
  }
}

void add_conv_params(ParamStore& store, const std::string& prefix, const ConvBlockShape& shape,
                     Rng& rng) {
  validate(shape);
  const std::size_t step = shape.out_width / shape.sublayers;
  for (std::size_t n = 0; n < shape.views; ++n) {
    for (std::size_t l = 0; l < shape.sublayers; ++l) {
      const auto p = layer_prefix(prefix, n, l);
      store.add(p + ".W", xavier_uniform(shape.in_width + l * step, step, rng));
      store.add(p + ".b", DenseArray({step}));
    }
  }
  store.add(prefix + ".merge.W", xavier_uniform(shape.views * shape.out_width, shape.out_width, rng));
}

Var dense_conv_view(const Var& adjacency, const Var& nodes, const ParamStore& store,
                    const std::string& prefix, std::size_t view, std::size_t sublayers) {
  if (adjacency.rows() != nodes.rows() || adjacency.cols() != nodes.rows()) {
    throw DimensionError("dense_conv_view: adjacency " + shape_string(adjacency.shape()) +
                         " does not match nodes " + shape_string(nodes.shape()));
  }
  Tape& tape = nodes.tape();
  std::vector<Var> inputs{nodes};
  std::vector<Var> outputs;
  for (std::size_t l = 0; l < sublayers; ++l) {
    const auto p = layer_prefix(prefix, view, l);
    const Var k = inputs.size() == 1 ? inputs.front() : ops::concat_cols(inputs);
    // A (k W) equals (A k) W; projecting first keeps the T' x T' product narrow.
    const Var projected = ops::matmul(k, tape.param(store, p + ".W"));
    const Var out =
        ops::relu(ops::add_row_bias(ops::matmul(adjacency, projected), tape.param(store, p + ".b")));
    outputs.push_back(out);
    inputs.push_back(out);
  }
  return outputs.size() == 1 ? outputs.front() : ops::concat_cols(outputs);
}

Var merge_views(const std::vector<Var>& view_outputs, const Var& merge_weight) {
  if (view_outputs.empty()) throw DimensionError("merge_views: no views");
  const auto& first = view_outputs.front().shape();
  for (const auto& v : view_outputs) {
    if (v.shape() != first) {
      throw DimensionError("merge_views: view shapes " + shape_string(first) + " and " +
                           shape_string(v.shape()) + " differ");
    }
  }
  const Var cat = view_outputs.size() == 1 ? view_outputs.front() : ops::concat_cols(view_outputs);
  return ops::relu(ops::matmul(cat, merge_weight));
}

Var conv_block(const std::vector<Var>& adjacency, const Var& nodes, const ParamStore& store,
               const std::string& prefix, std::size_t sublayers) {
  std::vector<Var> views;
  views.reserve(adjacency.size());
  for (std::size_t n = 0; n < adjacency.size(); ++n) {
    views.push_back(dense_conv_view(adjacency[n], nodes, store, prefix, n, sublayers));
  }
  return merge_views(views, nodes.tape().param(store, prefix + ".merge.W"));
}

}  // namespace gdpnet::graph
