// AArch64 only. NEON holds two doubles per register.

#if defined(__aarch64__)

#include <arm_neon.h>

#include "gdpnet/kernels.hpp"

namespace gdpnet::kernels {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemm_nn_neon(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                  double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      if (aip == 0.0) continue;
      axpy_neon(aip, b + p * n, c + i * n, n);
    }
  }
}

void gemm_tn_neon(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                  double* c) {
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t i = 0; i < m; ++i) {
      const double api = a[p * m + i];
      if (api == 0.0) continue;
      axpy_neon(api, b + p * n, c + i * n, n);
    }
  }
}

void gemm_nt_neon(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                  double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) c[i * n + j] += dot_neon(a + i * k, b + j * k, k);
  }
}

void sq_dist_neon(std::size_t m, std::size_t n, std::size_t d, const double* x, const double* y,
                  double* out) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      float64x2_t acc = vdupq_n_f64(0.0);
      std::size_t t = 0;
      for (; t + 2 <= d; t += 2) {
        const float64x2_t diff = vsubq_f64(vld1q_f64(x + i * d + t), vld1q_f64(y + j * d + t));
        acc = vfmaq_f64(acc, diff, diff);
      }
      double s = vaddvq_f64(acc);
      for (; t < d; ++t) {
        const double diff = x[i * d + t] - y[j * d + t];
        s += diff * diff;
      }
      out[i * n + j] = s;
    }
  }
}

double kl_cross_neon(const double* var_i, const double* mu_i, const double* mu_j,
                     const double* w_j, std::size_t g) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t t = 0;
  for (; t + 2 <= g; t += 2) {
    const float64x2_t diff = vsubq_f64(vld1q_f64(mu_i + t), vld1q_f64(mu_j + t));
    const float64x2_t inner = vfmaq_f64(vld1q_f64(var_i + t), diff, diff);
    acc = vfmaq_f64(acc, vld1q_f64(w_j + t), inner);
  }
  double s = vaddvq_f64(acc);
  for (; t < g; ++t) {
    const double diff = mu_i[t] - mu_j[t];
    s += w_j[t] * (var_i[t] + diff * diff);
  }
  return s;
}

constexpr KernelTable kNeon{
    Backend::Neon, dot_neon,     axpy_neon,    gemm_nn_neon,
    gemm_tn_neon,  gemm_nt_neon, sq_dist_neon, kl_cross_neon,
};

}  // namespace

const KernelTable& neon_table() noexcept { return kNeon; }

}  // namespace gdpnet::kernels

#endif
