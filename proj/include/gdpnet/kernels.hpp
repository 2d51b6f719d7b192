#pragma once

// Dense inner-loop kernels. Every kernel has a portable scalar reference
// implementation and, where the target supports it, a SIMD variant (AVX2+FMA
// on x86-64, NEON on AArch64). The variant is picked once at startup from
// CPU feature detection; GDPNET_KERNELS=scalar in the environment forces the
// reference path. SIMD results differ from the reference only by
// floating-point reassociation and fused multiply-add rounding.

#include <cstddef>
#include <string_view>

namespace gdpnet::kernels {

enum class Backend { Scalar, Avx2, Neon };

struct KernelTable {
  Backend backend;

  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // C(m x n) += A(m x k) * B(k x n)
  void (*gemm_nn)(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                  double* c);
  // C(m x n) += A(k x m)^T * B(k x n)
  void (*gemm_tn)(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                  double* c);
  // C(m x n) += A(m x k) * B(n x k)^T
  void (*gemm_nt)(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                  double* c);
  // D(m x n) = squared Euclidean distance between rows of X(m x d) and Y(n x d)
  void (*sq_dist)(std::size_t m, std::size_t n, std::size_t d, const double* x, const double* y,
                  double* out);
  // sum_k w[k] * (var_i[k] + (mu_i[k] - mu_j[k])^2); the data-dependent part
  // of the diagonal-Gaussian KL divergence.
  double (*kl_cross)(const double* var_i, const double* mu_i, const double* mu_j,
                     const double* w_j, std::size_t g);
};

const KernelTable& scalar_table() noexcept;
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_table() noexcept;
#endif
#if defined(__aarch64__)
const KernelTable& neon_table() noexcept;
#endif

bool backend_available(Backend b) noexcept;
std::string_view backend_name(Backend b) noexcept;

// Table for a specific backend; throws ArgumentError if unavailable here.
const KernelTable& table_for(Backend b);

// Currently dispatched table.
const KernelTable& active() noexcept;
Backend active_backend() noexcept;
// Switches the process-wide dispatch. Not meant to be called while other
// threads are evaluating the model.
void set_backend(Backend b);

inline double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active().axpy(alpha, x, y, n);
}
inline void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                    double* c) {
  active().gemm_nn(m, n, k, a, b, c);
}
inline void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                    double* c) {
  active().gemm_tn(m, n, k, a, b, c);
}
inline void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                    double* c) {
  active().gemm_nt(m, n, k, a, b, c);
}
inline void sq_dist(std::size_t m, std::size_t n, std::size_t d, const double* x, const double* y,
                    double* out) {
  active().sq_dist(m, n, d, x, y, out);
}
inline double kl_cross(const double* var_i, const double* mu_i, const double* mu_j,
                       const double* w_j, std::size_t g) {
  return active().kl_cross(var_i, mu_i, mu_j, w_j, g);
}

}  // namespace gdpnet::kernels
