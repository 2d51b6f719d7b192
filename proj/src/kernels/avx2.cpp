// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "gdpnet/kernels.hpp"

namespace gdpnet::kernels {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemm_nn_avx2(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                  double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      if (aip == 0.0) continue;
      axpy_avx2(aip, b + p * n, ci, n);
    }
  }
}

void gemm_tn_avx2(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                  double* c) {
  for (std::size_t p = 0; p < k; ++p) {
    const double* ap = a + p * m;
    const double* bp = b + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double api = ap[i];
      if (api == 0.0) continue;
      axpy_avx2(api, bp, c + i * n, n);
    }
  }
}

void gemm_nt_avx2(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                  double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) c[i * n + j] += dot_avx2(a + i * k, b + j * k, k);
  }
}

void sq_dist_avx2(std::size_t m, std::size_t n, std::size_t d, const double* x, const double* y,
                  double* out) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* xi = x + i * d;
    for (std::size_t j = 0; j < n; ++j) {
      const double* yj = y + j * d;
      __m256d acc = _mm256_setzero_pd();
      std::size_t t = 0;
      for (; t + 4 <= d; t += 4) {
        const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(xi + t), _mm256_loadu_pd(yj + t));
        acc = _mm256_fmadd_pd(diff, diff, acc);
      }
      double s = hsum(acc);
      for (; t < d; ++t) {
        const double diff = xi[t] - yj[t];
        s += diff * diff;
      }
      out[i * n + j] = s;
    }
  }
}

double kl_cross_avx2(const double* var_i, const double* mu_i, const double* mu_j,
                     const double* w_j, std::size_t g) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t t = 0;
  for (; t + 4 <= g; t += 4) {
    const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(mu_i + t), _mm256_loadu_pd(mu_j + t));
    const __m256d inner = _mm256_fmadd_pd(diff, diff, _mm256_loadu_pd(var_i + t));
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w_j + t), inner, acc);
  }
  double s = hsum(acc);
  for (; t < g; ++t) {
    const double diff = mu_i[t] - mu_j[t];
    s += w_j[t] * (var_i[t] + diff * diff);
  }
  return s;
}

constexpr KernelTable kAvx2{
    Backend::Avx2, dot_avx2,     axpy_avx2,    gemm_nn_avx2,
    gemm_tn_avx2,  gemm_nt_avx2, sq_dist_avx2, kl_cross_avx2,
};

}  // namespace

const KernelTable& avx2_table() noexcept { return kAvx2; }

}  // namespace gdpnet::kernels
