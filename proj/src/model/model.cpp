#include "gdpnet/model.hpp"

#include <algorithm>
#include <numeric>

#include "gdpnet/dtwpool.hpp"
#include "gdpnet/errors.hpp"
#include "gdpnet/graphconv.hpp"
#include "gdpnet/ops.hpp"
#include "gdpnet/softdtw.hpp"

namespace gdpnet::model {
namespace {

std::string stage_name(const char* base, std::size_t stage) {
  return std::string(base) + ".stage" + std::to_string(stage);
}

void add_linear(ParamStore& store, const std::string& prefix, std::size_t in, std::size_t out,
                Rng& rng) {
  store.add(prefix + ".W", xavier_uniform(in, out, rng));
  store.add(prefix + ".b", DenseArray({out}));
}

Var dropout(const Var& x, double rate, Rng& rng) {
  DenseArray mask(x.shape());
  const double keep = 1.0 / (1.0 - rate);
  for (auto& m : mask.values()) m = rng.uniform() < rate ? 0.0 : keep;
  return ops::mul_constant(x, mask);
}

}  // namespace

const std::vector<std::size_t>& ForwardRecord::final_positions() const {
  return stages.empty() ? node_positions : stages.back().positions;
}

double ForwardRecord::mean_realized_ratio() const {
  if (stages.empty()) return 1.0;
  double total = 0.0;
  for (const auto& s : stages) total += s.realized_ratio;
  return total / static_cast<double>(stages.size());
}

std::size_t argmax(std::span<const double> logits) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < logits.size(); ++i) {
    if (logits[i] > logits[best]) best = i;
  }
  return best;
}

Model::Model(ModelConfig config) : config_(std::move(config)) {
  config_.validate();
  const auto& c = config_;
  Rng rng(c.seed);

  const std::size_t edge_stages = c.regenerate_edges ? std::max<std::size_t>(c.stages, 1) : 1;
  for (std::size_t s = 1; s <= edge_stages; ++s) {
    const std::size_t in = s == 1 ? c.input_width : c.node_width;
    if (c.attention_edges) {
      graph::add_attention_params(params_, stage_name("edges", s), in, c.gaussian_width, c.views,
                                  rng);
    } else {
      graph::add_gaussian_params(params_, stage_name("edges", s), in, c.gaussian_width, c.views,
                                 rng);
    }
  }

  const std::size_t conv_stages = std::max<std::size_t>(c.stages, 1);
  for (std::size_t s = 1; s <= conv_stages; ++s) {
    graph::ConvBlockShape shape;
    shape.in_width = s == 1 ? c.input_width : c.node_width;
    shape.out_width = c.node_width;
    shape.sublayers = c.sublayers;
    shape.views = c.views;
    graph::add_conv_params(params_, stage_name("conv", s), shape, rng);
  }

  const std::size_t pool_sets = c.per_stage_pool ? c.stages : std::min<std::size_t>(c.stages, 1);
  for (std::size_t s = 1; s <= pool_sets; ++s) add_linear(params_, pool_prefix(s), c.node_width, 1, rng);

  const std::size_t q_in = std::max<std::size_t>(c.stages, 1) * c.node_width;
  add_linear(params_, "readout", q_in, c.node_width, rng);
  add_linear(params_, "classifier", c.input_width + c.node_width, c.classes, rng);
  if (c.trainable_cls) params_.add("cls.start", xavier_uniform(1, c.input_width, rng));
}

std::string Model::pool_prefix(std::size_t stage) const {
  return config_.per_stage_pool ? stage_name("pool", stage) : std::string("pool");
}

ForwardRecord Model::forward(Tape& tape, const data::TokenSequence& example, bool train,
                             Rng* dropout_rng) const {
  const auto& c = config_;
  const std::size_t t = example.length();
  if (t < 1) throw InputError("example '" + example.id + "' has no tokens besides CLS/SEP");
  if (example.width() != c.input_width) {
    throw ConfigError("example '" + example.id + "' has embedding width " +
                      std::to_string(example.width()) + ", model expects " +
                      std::to_string(c.input_width));
  }
  const bool use_dropout = train && c.dropout > 0.0;
  if (use_dropout && dropout_rng == nullptr) throw ArgumentError("dropout needs an rng");

  ForwardRecord rec;
  const std::size_t n_nodes = t + 1;  // tokens plus SEP
  rec.node_positions.resize(n_nodes);
  std::iota(rec.node_positions.begin(), rec.node_positions.end(), std::size_t{1});

  DenseArray v0({n_nodes, c.input_width});
  std::copy(example.embeddings.values().begin() + static_cast<std::ptrdiff_t>(c.input_width),
            example.embeddings.values().end(), v0.values().begin());
  Var nodes = tape.constant(std::move(v0));

  Var h0;
  if (c.trainable_cls) {
    h0 = tape.param(params_, "cls.start");
  } else {
    h0 = tape.constant(DenseArray({1, c.input_width},
                                  std::vector<double>(example.embeddings.row(0).begin(),
                                                      example.embeddings.row(0).end())));
  }

  // Edges stay as raw scores; a pooled stage renormalizes the sliced scores
  // over its surviving columns.
  const auto make_scores = [&](const Var& x, std::size_t stage) {
    const std::string prefix = stage_name("edges", stage);
    return c.attention_edges ? graph::attention_scores(x, params_, prefix, c.views)
                             : graph::gaussian_scores(x, params_, prefix, c.views);
  };
  const auto normalize = [&](const std::vector<Var>& scores) {
    std::vector<Var> out;
    for (const auto& sc : scores) {
      out.push_back(c.attention_edges ? ops::row_softmax(sc)
                                      : graph::normalize_scores(sc, c.adjacency_norm));
    }
    return out;
  };

  std::vector<Var> scores = make_scores(nodes, 1);
  std::vector<Var> adj = normalize(scores);
  std::vector<std::size_t> positions = rec.node_positions;
  Var readout_in;

  if (c.stages == 0) {
    Var conv = graph::conv_block(adj, nodes, params_, stage_name("conv", 1), c.sublayers);
    if (use_dropout) conv = dropout(conv, c.dropout, *dropout_rng);
    rec.v1 = conv;
    readout_in = conv;
  } else {
    for (std::size_t s = 1; s <= c.stages; ++s) {
      if (s > 1) {
        const auto& prev = rec.stages.back().positions;
        if (c.regenerate_edges) {
          scores = make_scores(nodes, s);
        } else {
          // Survivor indices local to the previous stage's node list.
          std::vector<std::size_t> keep;
          keep.reserve(prev.size());
          for (auto p : prev) {
            keep.push_back(static_cast<std::size_t>(
                std::lower_bound(positions.begin(), positions.end(), p) - positions.begin()));
          }
          for (auto& sc : scores) sc = ops::gather_submatrix(sc, keep);
        }
        adj = normalize(scores);
        positions = prev;
      }

      Var conv = graph::conv_block(adj, nodes, params_, stage_name("conv", s), c.sublayers);
      if (use_dropout) conv = dropout(conv, c.dropout, *dropout_rng);
      if (s == 1) rec.v1 = conv;

      const std::string pp = pool_prefix(s);
      auto pooled = pool::dtw_pool(adj, conv, tape.param(params_, pp + ".W"),
                                   tape.param(params_, pp + ".b"), c.ratio);
      StageTrace st;
      st.features = pooled.features;
      st.realized_ratio = pooled.selection.realized_ratio;
      for (auto i : pooled.selection.survivors) st.positions.push_back(positions[i]);
      rec.stages.push_back(std::move(st));
      nodes = pooled.features;
    }

    // Each final survivor's pooled features from every stage, side by side.
    const auto& final_pos = rec.stages.back().positions;
    std::vector<Var> parts;
    for (const auto& st : rec.stages) {
      std::vector<std::size_t> rows;
      rows.reserve(final_pos.size());
      for (auto p : final_pos) {
        rows.push_back(static_cast<std::size_t>(
            std::lower_bound(st.positions.begin(), st.positions.end(), p) - st.positions.begin()));
      }
      parts.push_back(ops::gather_rows(st.features, rows));
    }
    readout_in = parts.size() == 1 ? parts.front() : ops::concat_cols(parts);
  }

  const Var f = ops::column_max(
      ops::linear(readout_in, tape.param(params_, "readout.W"), tape.param(params_, "readout.b")));
  rec.h_final = ops::concat_cols({h0, f});
  rec.logits = ops::linear(rec.h_final, tape.param(params_, "classifier.W"),
                           tape.param(params_, "classifier.b"));
  return rec;
}

LossTerms Model::loss(const ForwardRecord& record, std::uint32_t label) const {
  if (label >= config_.classes) {
    throw IndexError("label " + std::to_string(label) + " out of range for " +
                     std::to_string(config_.classes) + " classes");
  }
  LossTerms out;
  const Var cse = ops::cross_entropy(record.logits, label);
  out.cse = cse.value().item();
  out.total = cse;
  if (record.stages.empty()) return out;

  const Var dtw = dtw::soft_dtw(record.v1, record.stages.back().features, config_.gamma);
  out.dtw = dtw.value().item();
  if (config_.dtw_weight != 0.0) out.total = ops::add(cse, ops::scale(dtw, config_.dtw_weight));
  return out;
}

}  // namespace gdpnet::model
