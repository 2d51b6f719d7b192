#include "gdpnet/gaussian_graph.hpp"

#include <cmath>

#include "gdpnet/errors.hpp"
#include "gdpnet/kernels.hpp"
#include "gdpnet/ops.hpp"

namespace gdpnet::graph {
namespace {

// Added to raw KL scores before plain row-sum normalization so that a row of
// identical nodes (all scores zero) still normalizes to uniform.
constexpr double kRowSumFloor = 1e-9;

std::string view_prefix(const std::string& prefix, std::size_t n) {
  return prefix + ".view" + std::to_string(n);
}

struct KlPrecomputed {
  std::vector<double> log_sum;  // sum_k ln sigma_ik
  DenseArray var;               // sigma^2
  DenseArray half_precision;    // 1 / (2 sigma^2)
};

KlPrecomputed precompute(const DenseArray& stddev) {
  KlPrecomputed p{std::vector<double>(stddev.rows(), 0.0), DenseArray(stddev.shape()),
                  DenseArray(stddev.shape())};
  for (std::size_t i = 0; i < stddev.rows(); ++i) {
    for (std::size_t k = 0; k < stddev.cols(); ++k) {
      const double s = stddev.at(i, k);
      if (!(s > 0.0)) throw DomainError("Gaussian stddev must be positive");
      p.log_sum[i] += std::log(s);
      p.var.at(i, k) = s * s;
      p.half_precision.at(i, k) = 0.5 / (s * s);
    }
  }
  return p;
}

}  // namespace

AdjacencyNorm parse_adjacency_norm(std::string_view s) {
  if (s == "softmax") return AdjacencyNorm::Softmax;
  if (s == "row_sum") return AdjacencyNorm::RowSum;
  if (s == "none") return AdjacencyNorm::None;
  throw ArgumentError("unknown adjacency_norm '" + std::string(s) + "'");
}

std::string_view to_string(AdjacencyNorm n) noexcept {
  switch (n) {
    case AdjacencyNorm::Softmax:
      return "softmax";
    case AdjacencyNorm::RowSum:
      return "row_sum";
    case AdjacencyNorm::None:
      return "none";
  }
  return "?";
}

double kl_diag_gaussian(std::span<const double> mu_i, std::span<const double> sigma_i,
                        std::span<const double> mu_j, std::span<const double> sigma_j) {
  const std::size_t g = mu_i.size();
  if (sigma_i.size() != g || mu_j.size() != g || sigma_j.size() != g) {
    throw DimensionError("kl_diag_gaussian: vector lengths differ");
  }
  double kl = 0.0;
  for (std::size_t k = 0; k < g; ++k) {
    if (!(sigma_i[k] > 0.0) || !(sigma_j[k] > 0.0)) {
      throw DomainError("kl_diag_gaussian: sigma must be positive");
    }
    const double ratio = sigma_i[k] / sigma_j[k];
    const double diff = (mu_i[k] - mu_j[k]) / sigma_j[k];
    kl += -std::log(ratio) + 0.5 * (ratio * ratio - 1.0) + 0.5 * diff * diff;
  }
  return kl > 0.0 ? kl : 0.0;
}

DenseArray pairwise_kl(const DenseArray& mean, const DenseArray& stddev) {
  if (!mean.same_shape(stddev) || mean.rank() != 2) {
    throw DimensionError("pairwise_kl: mean " + shape_string(mean.shape()) + " vs stddev " +
                         shape_string(stddev.shape()));
  }
  const std::size_t t = mean.rows(), g = mean.cols();
  const auto pre = precompute(stddev);
  const auto& kt = kernels::active();
  DenseArray out({t, t});
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t j = 0; j < t; ++j) {
      if (i == j) continue;
      const double cross = kt.kl_cross(pre.var.row(i).data(), mean.row(i).data(),
                                       mean.row(j).data(), pre.half_precision.row(j).data(), g);
      const double kl = pre.log_sum[j] - pre.log_sum[i] + cross - 0.5 * static_cast<double>(g);
      out.at(i, j) = kl > 0.0 ? kl : 0.0;
    }
  }
  return out;
}

DenseArray normalize_scores(const DenseArray& raw, AdjacencyNorm norm) {
  switch (norm) {
    case AdjacencyNorm::Softmax:
      return numeric::row_softmax(raw);
    case AdjacencyNorm::RowSum: {
      DenseArray out(raw.shape());
      for (std::size_t i = 0; i < raw.rows(); ++i) {
        double s = 0.0;
        for (double v : raw.row(i)) s += v + kRowSumFloor;
        for (std::size_t j = 0; j < raw.cols(); ++j) out.at(i, j) = (raw.at(i, j) + kRowSumFloor) / s;
      }
      return out;
    }
    case AdjacencyNorm::None:
      return raw;
  }
  return raw;
}

std::vector<DenseArray> build_adjacency(const GaussianBank& bank, AdjacencyNorm norm) {
  std::vector<DenseArray> out;
  out.reserve(bank.views());
  for (std::size_t n = 0; n < bank.views(); ++n) {
    out.push_back(normalize_scores(pairwise_kl(bank.mean[n], bank.stddev[n]), norm));
  }
  return out;
}

void add_gaussian_params(ParamStore& store, const std::string& prefix, std::size_t in_width,
                         std::size_t gaussian_width, std::size_t views, Rng& rng) {
  for (std::size_t n = 0; n < views; ++n) {
    const auto p = view_prefix(prefix, n);
    store.add(p + ".mean.W", xavier_uniform(in_width, gaussian_width, rng));
    store.add(p + ".mean.b", DenseArray({gaussian_width}));
    store.add(p + ".scale.W", xavier_uniform(in_width, gaussian_width, rng));
    store.add(p + ".scale.b", DenseArray({gaussian_width}));
  }
}

GaussianVars encode_gaussians(const Var& nodes, const ParamStore& store, const std::string& prefix,
                              std::size_t views) {
  Tape& tape = nodes.tape();
  GaussianVars out;
  for (std::size_t n = 0; n < views; ++n) {
    const auto p = view_prefix(prefix, n);
    out.mean.push_back(
        ops::linear(nodes, tape.param(store, p + ".mean.W"), tape.param(store, p + ".mean.b")));
    out.stddev.push_back(ops::softplus(
        ops::linear(nodes, tape.param(store, p + ".scale.W"), tape.param(store, p + ".scale.b"))));
  }
  return out;
}

GaussianBank to_bank(const GaussianVars& vars) {
  GaussianBank bank;
  for (const auto& m : vars.mean) bank.mean.push_back(m.value());
  for (const auto& s : vars.stddev) bank.stddev.push_back(s.value());
  return bank;
}

Var pairwise_kl(const Var& mean, const Var& stddev) {
  DenseArray raw = pairwise_kl(mean.value(), stddev.value());
  DenseArray saved = raw;
  const bool rg = mean.requires_grad() || stddev.requires_grad();
  return mean.tape().record(
      std::move(raw), rg, [mean, stddev, saved = std::move(saved)](Tape& t, const DenseArray& g) {
        const auto& mu = mean.value();
        const auto& sd = stddev.value();
        const std::size_t nodes = mu.rows(), width = mu.cols();
        DenseArray dmu(mu.shape());
        DenseArray dsd(sd.shape());
        for (std::size_t i = 0; i < nodes; ++i) {
          for (std::size_t j = 0; j < nodes; ++j) {
            const double gij = g.at(i, j);
            // Diagonal is a constant zero; clamped entries carry no gradient.
            if (i == j || gij == 0.0 || saved.at(i, j) <= 0.0) continue;
            for (std::size_t k = 0; k < width; ++k) {
              const double si = sd.at(i, k), sj = sd.at(j, k);
              const double delta = mu.at(i, k) - mu.at(j, k);
              const double prec = 1.0 / (sj * sj);
              dmu.at(i, k) += gij * delta * prec;
              dmu.at(j, k) -= gij * delta * prec;
              dsd.at(i, k) += gij * (si * prec - 1.0 / si);
              dsd.at(j, k) += gij * (1.0 / sj - (si * si + delta * delta) * prec / sj);
            }
          }
        }
        if (mean.requires_grad()) {
          auto& gm = t.grad(mean);
          for (std::size_t i = 0; i < gm.size(); ++i) gm[i] += dmu[i];
        }
        if (stddev.requires_grad()) {
          auto& gs = t.grad(stddev);
          for (std::size_t i = 0; i < gs.size(); ++i) gs[i] += dsd[i];
        }
      });
}

Var normalize_scores(const Var& raw, AdjacencyNorm norm) {
  switch (norm) {
    case AdjacencyNorm::Softmax:
      return ops::row_softmax(raw);
    case AdjacencyNorm::RowSum: {
      DenseArray floor(raw.shape(), kRowSumFloor);
      Var floored = ops::add(raw, raw.tape().constant(std::move(floor)));
      return ops::row_normalize(floored);
    }
    case AdjacencyNorm::None:
      return raw;
  }
  return raw;
}

std::vector<Var> gaussian_scores(const Var& nodes, const ParamStore& store,
                                 const std::string& prefix, std::size_t views) {
  const auto gauss = encode_gaussians(nodes, store, prefix, views);
  std::vector<Var> out;
  out.reserve(views);
  for (std::size_t n = 0; n < views; ++n) out.push_back(pairwise_kl(gauss.mean[n], gauss.stddev[n]));
  return out;
}

std::vector<Var> gaussian_adjacency(const Var& nodes, const ParamStore& store,
                                    const std::string& prefix, std::size_t views,
                                    AdjacencyNorm norm) {
  auto out = gaussian_scores(nodes, store, prefix, views);
  for (auto& a : out) a = normalize_scores(a, norm);
  return out;
}

void add_attention_params(ParamStore& store, const std::string& prefix, std::size_t in_width,
                          std::size_t key_width, std::size_t views, Rng& rng) {
  for (std::size_t n = 0; n < views; ++n) {
    const auto p = view_prefix(prefix, n);
    store.add(p + ".query.W", xavier_uniform(in_width, key_width, rng));
    store.add(p + ".key.W", xavier_uniform(in_width, key_width, rng));
  }
}

std::vector<Var> attention_scores(const Var& nodes, const ParamStore& store,
                                  const std::string& prefix, std::size_t views) {
  Tape& tape = nodes.tape();
  std::vector<Var> out;
  for (std::size_t n = 0; n < views; ++n) {
    const auto p = view_prefix(prefix, n);
    const Var q = ops::matmul(nodes, tape.param(store, p + ".query.W"));
    const Var k = ops::matmul(nodes, tape.param(store, p + ".key.W"));
    const double inv = 1.0 / std::sqrt(static_cast<double>(q.cols()));
    out.push_back(ops::scale(ops::matmul_nt(q, k), inv));
  }
  return out;
}

std::vector<Var> attention_adjacency(const Var& nodes, const ParamStore& store,
                                     const std::string& prefix, std::size_t views) {
  auto out = attention_scores(nodes, store, prefix, views);
  for (auto& a : out) a = ops::row_softmax(a);
  return out;
}

}  // namespace gdpnet::graph
