#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "gdpnet/errors.hpp"
#include "gdpnet/kernels.hpp"
#include "gdpnet/random.hpp"

namespace k = gdpnet::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, gdpnet::Rng& rng, double sparsity = 0.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform() < sparsity ? 0.0 : rng.uniform(-2.0, 2.0);
  return v;
}

void expect_close(const std::vector<double>& a, const std::vector<double>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(a[i], b[i], 1e-12 * (1.0 + std::abs(b[i]))) << "index " << i;
  }
}

std::vector<k::Backend> simd_backends() {
  std::vector<k::Backend> out;
  for (auto b : {k::Backend::Avx2, k::Backend::Neon}) {
    if (k::backend_available(b)) out.push_back(b);
  }
  return out;
}

// Sizes straddle the 4-wide vector width and its unrolled multiples.
const std::size_t kSizes[] = {1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 67};

}  // namespace

TEST(Kernels, ScalarAlwaysAvailable) {
  EXPECT_TRUE(k::backend_available(k::Backend::Scalar));
  EXPECT_EQ(k::table_for(k::Backend::Scalar).backend, k::Backend::Scalar);
}

TEST(Kernels, UnavailableBackendThrows) {
  for (auto b : {k::Backend::Avx2, k::Backend::Neon}) {
    if (!k::backend_available(b)) EXPECT_THROW(k::table_for(b), gdpnet::ArgumentError);
  }
}

TEST(Kernels, DotAndAxpyMatchScalar) {
  gdpnet::Rng rng(1);
  const auto& ref = k::scalar_table();
  for (auto b : simd_backends()) {
    const auto& simd = k::table_for(b);
    for (auto n : kSizes) {
      const auto x = random_vec(n, rng), y = random_vec(n, rng);
      EXPECT_NEAR(simd.dot(x.data(), y.data(), n), ref.dot(x.data(), y.data(), n), 1e-12 * n);
      auto y1 = y, y2 = y;
      simd.axpy(0.37, x.data(), y1.data(), n);
      ref.axpy(0.37, x.data(), y2.data(), n);
      expect_close(y1, y2);
    }
  }
}

TEST(Kernels, GemmVariantsMatchScalar) {
  gdpnet::Rng rng(2);
  const auto& ref = k::scalar_table();
  for (auto b : simd_backends()) {
    const auto& simd = k::table_for(b);
    for (auto m : {1, 3, 6}) {
      for (auto n : kSizes) {
        for (auto kk : {1, 5, 9}) {
          const std::size_t M = m, N = n, K = kk;
          const auto a = random_vec(M * K, rng, 0.3);
          const auto bmat = random_vec(K * N, rng);
          const auto bt = random_vec(N * K, rng);
          const auto at = random_vec(K * M, rng, 0.3);
          const auto c0 = random_vec(M * N, rng);
          auto c1 = c0, c2 = c0;
          simd.gemm_nn(M, N, K, a.data(), bmat.data(), c1.data());
          ref.gemm_nn(M, N, K, a.data(), bmat.data(), c2.data());
          expect_close(c1, c2);
          c1 = c0, c2 = c0;
          simd.gemm_tn(M, N, K, at.data(), bmat.data(), c1.data());
          ref.gemm_tn(M, N, K, at.data(), bmat.data(), c2.data());
          expect_close(c1, c2);
          c1 = c0, c2 = c0;
          simd.gemm_nt(M, N, K, a.data(), bt.data(), c1.data());
          ref.gemm_nt(M, N, K, a.data(), bt.data(), c2.data());
          expect_close(c1, c2);
        }
      }
    }
  }
}

TEST(Kernels, DistanceKernelsMatchScalar) {
  gdpnet::Rng rng(3);
  const auto& ref = k::scalar_table();
  for (auto b : simd_backends()) {
    const auto& simd = k::table_for(b);
    for (auto d : kSizes) {
      const std::size_t m = 4, n = 3;
      const auto x = random_vec(m * d, rng), y = random_vec(n * d, rng);
      std::vector<double> o1(m * n), o2(m * n);
      simd.sq_dist(m, n, d, x.data(), y.data(), o1.data());
      ref.sq_dist(m, n, d, x.data(), y.data(), o2.data());
      expect_close(o1, o2);

      auto var = random_vec(d, rng);
      for (auto& v : var) v = std::abs(v) + 0.1;
      const auto w = random_vec(d, rng);
      const auto mi = random_vec(d, rng), mj = random_vec(d, rng);
      EXPECT_NEAR(simd.kl_cross(var.data(), mi.data(), mj.data(), w.data(), d),
                  ref.kl_cross(var.data(), mi.data(), mj.data(), w.data(), d), 1e-12 * d);
    }
  }
}

TEST(Kernels, ScalarReferenceIsExactOnSmallIntegers) {
  const double a[] = {1, 2, 3, 4, 5};
  const double b[] = {5, 4, 3, 2, 1};
  EXPECT_EQ(k::scalar_table().dot(a, b, 5), 35.0);
  double c[4] = {0, 0, 0, 0};
  const double A[] = {1, 2, 3, 4};  // 2x2
  const double B[] = {5, 6, 7, 8};
  k::scalar_table().gemm_nn(2, 2, 2, A, B, c);
  EXPECT_EQ(c[0], 19.0);
  EXPECT_EQ(c[1], 22.0);
  EXPECT_EQ(c[2], 43.0);
  EXPECT_EQ(c[3], 50.0);
}

TEST(Kernels, SetBackendSwitchesDispatch) {
  const auto before = k::active_backend();
  k::set_backend(k::Backend::Scalar);
  EXPECT_EQ(k::active_backend(), k::Backend::Scalar);
  k::set_backend(before);
  EXPECT_EQ(k::active_backend(), before);
}
