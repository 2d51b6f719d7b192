#include "gdpnet/kernels.hpp"

namespace gdpnet::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemm_nn_scalar(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                    double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      if (aip == 0.0) continue;
      const double* bp = b + p * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
    }
  }
}

void gemm_tn_scalar(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                    double* c) {
  for (std::size_t p = 0; p < k; ++p) {
    const double* ap = a + p * m;
    const double* bp = b + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double api = ap[i];
      if (api == 0.0) continue;
      double* ci = c + i * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += api * bp[j];
    }
  }
}

void gemm_nt_scalar(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                    double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) c[i * n + j] += dot_scalar(a + i * k, b + j * k, k);
  }
}

void sq_dist_scalar(std::size_t m, std::size_t n, std::size_t d, const double* x, const double* y,
                    double* out) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < d; ++t) {
        const double diff = x[i * d + t] - y[j * d + t];
        s += diff * diff;
      }
      out[i * n + j] = s;
    }
  }
}

double kl_cross_scalar(const double* var_i, const double* mu_i, const double* mu_j,
                       const double* w_j, std::size_t g) {
  double s = 0.0;
  for (std::size_t t = 0; t < g; ++t) {
    const double diff = mu_i[t] - mu_j[t];
    s += w_j[t] * (var_i[t] + diff * diff);
  }
  return s;
}

constexpr KernelTable kScalar{
    Backend::Scalar, dot_scalar,     axpy_scalar,    gemm_nn_scalar,
    gemm_tn_scalar,  gemm_nt_scalar, sq_dist_scalar, kl_cross_scalar,
};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

}  // namespace gdpnet::kernels
