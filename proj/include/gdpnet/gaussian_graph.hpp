#pragma once

// Latent multi-view edge generation. Each node is encoded into one diagonal
// Gaussian per view; the directed edge i -> j on view n is weighted by
// KL(N_i^n || N_j^n). Asymmetry of the KL divergence makes every view a
// directed graph.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gdpnet/dense_array.hpp"
#include "gdpnet/param_store.hpp"
#include "gdpnet/random.hpp"
#include "gdpnet/tape.hpp"

namespace gdpnet::graph {

enum class AdjacencyNorm { Softmax, RowSum, None };

AdjacencyNorm parse_adjacency_norm(std::string_view s);
std::string_view to_string(AdjacencyNorm n) noexcept;

/// Per-view node Gaussians: mean[n] and stddev[n] are T' x g.
struct GaussianBank {
  std::vector<DenseArray> mean;
  std::vector<DenseArray> stddev;

  std::size_t views() const noexcept { return mean.size(); }
  std::size_t nodes() const noexcept { return mean.empty() ? 0 : mean.front().rows(); }
  std::size_t width() const noexcept { return mean.empty() ? 0 : mean.front().cols(); }
};

/// KL(N(mu_i, diag sigma_i^2) || N(mu_j, diag sigma_j^2)), closed form.
/// Throws DomainError on a non-positive sigma, DimensionError on length mismatch.
double kl_diag_gaussian(std::span<const double> mu_i, std::span<const double> sigma_i,
                        std::span<const double> mu_j, std::span<const double> sigma_j);

/// Raw score matrix e_ij = KL(node i || node j) for one view. The diagonal is
/// exactly zero.
DenseArray pairwise_kl(const DenseArray& mean, const DenseArray& stddev);

/// Row-normalized adjacency for each view of the bank.
std::vector<DenseArray> build_adjacency(const GaussianBank& bank, AdjacencyNorm norm);
DenseArray normalize_scores(const DenseArray& raw, AdjacencyNorm norm);

// ---- differentiable path ---------------------------------------------------

/// Registers 2N affine encoders (mean and pre-softplus scale per view).
void add_gaussian_params(ParamStore& store, const std::string& prefix, std::size_t in_width,
                         std::size_t gaussian_width, std::size_t views, Rng& rng);

struct GaussianVars {
  std::vector<Var> mean;
  std::vector<Var> stddev;
};

GaussianVars encode_gaussians(const Var& nodes, const ParamStore& store, const std::string& prefix,
                              std::size_t views);
GaussianBank to_bank(const GaussianVars& vars);

Var pairwise_kl(const Var& mean, const Var& stddev);
Var normalize_scores(const Var& raw, AdjacencyNorm norm);

/// Raw per-view KL score matrices, before normalization.
std::vector<Var> gaussian_scores(const Var& nodes, const ParamStore& store,
                                 const std::string& prefix, std::size_t views);

/// Full generator: encoders, pairwise KL and normalization, one matrix per view.
std::vector<Var> gaussian_adjacency(const Var& nodes, const ParamStore& store,
                                    const std::string& prefix, std::size_t views,
                                    AdjacencyNorm norm);

// ---- ablation: attention-initialized edges --------------------------------

void add_attention_params(ParamStore& store, const std::string& prefix, std::size_t in_width,
                          std::size_t key_width, std::size_t views, Rng& rng);

/// Per view: the scaled bilinear logits (V Wq)(V Wk)^T / sqrt(key_width).
std::vector<Var> attention_scores(const Var& nodes, const ParamStore& store,
                                  const std::string& prefix, std::size_t views);

/// Per view: row_softmax((V Wq)(V Wk)^T / sqrt(key_width)).
std::vector<Var> attention_adjacency(const Var& nodes, const ParamStore& store,
                                     const std::string& prefix, std::size_t views);

}  // namespace gdpnet::graph
