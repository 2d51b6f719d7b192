#include "gdpnet/softdtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gdpnet/errors.hpp"
#include "gdpnet/kernels.hpp"

namespace gdpnet::dtw {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ArgumentError("soft-DTW smoothing gamma must be positive");
  }
}

void check_cost(const DenseArray& cost) {
  if (cost.rank() != 2 || cost.rows() == 0 || cost.cols() == 0) {
    throw DimensionError("soft-DTW cost must be a non-empty matrix, got " +
                         shape_string(cost.shape()));
  }
}

// -gamma * ln(e^{-a/g} + e^{-b/g} + e^{-c/g}), stabilized on the minimum.
double softmin3(double a, double b, double c, double gamma) {
  const double m = std::min({a, b, c});
  if (m == kInf) return kInf;
  const double s = std::exp(-(a - m) / gamma) + std::exp(-(b - m) / gamma) +
                   std::exp(-(c - m) / gamma);
  return m - gamma * std::log(s);
}

}  // namespace

DenseArray squared_distances(const DenseArray& x, const DenseArray& y) {
  if (x.rank() != 2 || y.rank() != 2 || x.cols() != y.cols()) {
    throw DimensionError("squared_distances: shapes " + shape_string(x.shape()) + " and " +
                         shape_string(y.shape()));
  }
  DenseArray out({x.rows(), y.rows()});
  kernels::sq_dist(x.rows(), y.rows(), x.cols(), x.data(), y.data(), out.data());
  return out;
}

SoftDtwTable soft_dtw_table(const DenseArray& cost, double gamma) {
  check_gamma(gamma);
  check_cost(cost);
  const std::size_t m = cost.rows(), n = cost.cols();
  SoftDtwTable t{DenseArray({m + 2, n + 2}, kInf), gamma};
  t.r.at(0, 0) = 0.0;
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      t.r.at(i, j) = cost.at(i - 1, j - 1) +
                     softmin3(t.r.at(i - 1, j), t.r.at(i, j - 1), t.r.at(i - 1, j - 1), gamma);
    }
  }
  return t;
}

double soft_dtw(const DenseArray& cost, double gamma) { return soft_dtw_table(cost, gamma).value(); }

double soft_dtw(const DenseArray& x, const DenseArray& y, double gamma) {
  return soft_dtw(squared_distances(x, y), gamma);
}

DenseArray soft_dtw_alignment(const DenseArray& cost, const SoftDtwTable& table) {
  const std::size_t m = cost.rows(), n = cost.cols();
  const double gamma = table.gamma;
  DenseArray r = table.r;
  // Padded copies: cost with a zero border, E with the seed at (m+1, n+1).
  DenseArray d({m + 2, n + 2});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) d.at(i + 1, j + 1) = cost.at(i, j);
  }
  for (std::size_t i = 1; i <= m; ++i) r.at(i, n + 1) = -kInf;
  for (std::size_t j = 1; j <= n; ++j) r.at(m + 1, j) = -kInf;
  r.at(m + 1, n + 1) = r.at(m, n);

  DenseArray e({m + 2, n + 2});
  e.at(m + 1, n + 1) = 1.0;
  for (std::size_t j = n; j >= 1; --j) {
    for (std::size_t i = m; i >= 1; --i) {
      const double here = r.at(i, j);
      const double a = std::exp((r.at(i + 1, j) - here - d.at(i + 1, j)) / gamma);
      const double b = std::exp((r.at(i, j + 1) - here - d.at(i, j + 1)) / gamma);
      const double c = std::exp((r.at(i + 1, j + 1) - here - d.at(i + 1, j + 1)) / gamma);
      e.at(i, j) = e.at(i + 1, j) * a + e.at(i, j + 1) * b + e.at(i + 1, j + 1) * c;
    }
  }
  DenseArray out({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out.at(i, j) = e.at(i + 1, j + 1);
  }
  return out;
}

double hard_dtw(const DenseArray& cost) {
  check_cost(cost);
  const std::size_t m = cost.rows(), n = cost.cols();
  DenseArray r({m + 1, n + 1}, kInf);
  r.at(0, 0) = 0.0;
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      r.at(i, j) = cost.at(i - 1, j - 1) + std::min({r.at(i - 1, j), r.at(i, j - 1), r.at(i - 1, j - 1)});
    }
  }
  return r.at(m, n);
}

Var soft_dtw(const Var& x, const Var& y, double gamma) {
  check_gamma(gamma);
  DenseArray cost = squared_distances(x.value(), y.value());
  SoftDtwTable table = soft_dtw_table(cost, gamma);
  const double value = table.value();
  const bool rg = x.requires_grad() || y.requires_grad();
  return x.tape().record(
      DenseArray::scalar(value), rg,
      [x, y, cost = std::move(cost), table = std::move(table)](Tape& t, const DenseArray& g) {
        const DenseArray align = soft_dtw_alignment(cost, table);
        const auto& xv = x.value();
        const auto& yv = y.value();
        const std::size_t m = xv.rows(), n = yv.rows(), d = xv.cols();
        // d cost(i,j) / d x_i = 2 (x_i - y_j); d / d y_j = -2 (x_i - y_j)
        DenseArray* gx = x.requires_grad() ? &t.grad(x) : nullptr;
        DenseArray* gy = y.requires_grad() ? &t.grad(y) : nullptr;
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            const double w = 2.0 * g[0] * align.at(i, j);
            if (w == 0.0) continue;
            for (std::size_t k = 0; k < d; ++k) {
              const double diff = xv.at(i, k) - yv.at(j, k);
              if (gx) gx->at(i, k) += w * diff;
              if (gy) gy->at(j, k) -= w * diff;
            }
          }
        }
      });
}

}  // namespace gdpnet::dtw
