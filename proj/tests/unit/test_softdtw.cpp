#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <limits>

#include "gdpnet/errors.hpp"
#include "gdpnet/softdtw.hpp"
#include "test_util.hpp"

using namespace gdpnet;

namespace {

// Every monotone alignment path from (0, 0) to (m-1, n-1), summed directly.
double brute_soft_dtw(const DenseArray& cost, double gamma) {
  const std::size_t m = cost.rows(), n = cost.cols();
  std::vector<double> path_costs;
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j,
                                                                   double acc) {
    acc += cost.at(i, j);
    if (i == m - 1 && j == n - 1) {
      path_costs.push_back(acc);
      return;
    }
    if (i + 1 < m) walk(i + 1, j, acc);
    if (j + 1 < n) walk(i, j + 1, acc);
    if (i + 1 < m && j + 1 < n) walk(i + 1, j + 1, acc);
  };
  walk(0, 0, 0.0);
  double lo = std::numeric_limits<double>::infinity();
  for (double c : path_costs) lo = std::min(lo, c);
  double s = 0.0;
  for (double c : path_costs) s += std::exp(-(c - lo) / gamma);
  return lo - gamma * std::log(s);
}

double brute_hard_dtw(const DenseArray& cost) { return brute_soft_dtw(cost, 1e-12); }

}  // namespace

TEST(SoftDtw, MatchesPathEnumeration) {
  Rng rng(50);
  for (std::size_t m = 1; m <= 5; ++m) {
    for (std::size_t n = 1; n <= 5; ++n) {
      for (double gamma : {0.1, 1.0}) {
        const auto cost = test::random_array({m, n}, rng, 0.0, 3.0);
        EXPECT_NEAR(dtw::soft_dtw(cost, gamma), brute_soft_dtw(cost, gamma), 1e-8)
            << m << "x" << n << " gamma=" << gamma;
      }
    }
  }
}

TEST(SoftDtw, SingleFrameIsSquaredDistance) {
  const auto x = DenseArray::matrix({{1.0, 2.0}});
  const auto y = DenseArray::matrix({{4.0, -2.0}});
  EXPECT_DOUBLE_EQ(dtw::soft_dtw(x, y, 1.0), 25.0);
}

TEST(SoftDtw, SquaredDistances) {
  const auto x = DenseArray::matrix({{0.0, 0.0}, {1.0, 1.0}});
  const auto y = DenseArray::matrix({{3.0, 4.0}});
  EXPECT_EQ(dtw::squared_distances(x, y), DenseArray::matrix({{25.0}, {13.0}}));
  EXPECT_THROW(dtw::squared_distances(x, DenseArray({1, 3})), DimensionError);
}

TEST(SoftDtw, IdenticalSequencesAreNotPositive) {
  Rng rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = test::random_array({1 + rng.below(6), 3}, rng);
    EXPECT_LE(dtw::soft_dtw(x, x, 1.0), 0.0);
  }
}

TEST(SoftDtw, BoundedAboveByHardAndConvergesToIt) {
  Rng rng(52);
  for (int trial = 0; trial < 50; ++trial) {
    const auto cost = test::random_array({1 + rng.below(6), 1 + rng.below(6)}, rng, 0.0, 2.0);
    const double hard = dtw::hard_dtw(cost);
    EXPECT_NEAR(hard, brute_hard_dtw(cost), 1e-9);
    EXPECT_LE(dtw::soft_dtw(cost, 1.0), hard + 1e-12);
    EXPECT_NEAR(dtw::soft_dtw(cost, 1e-3), hard, 1e-2);
  }
}

TEST(SoftDtw, AlignmentIsCostGradient) {
  Rng rng(53);
  const auto cost = test::random_array({4, 3}, rng, 0.0, 2.0);
  const auto table = dtw::soft_dtw_table(cost, 0.7);
  const auto e = dtw::soft_dtw_alignment(cost, table);
  for (std::size_t i = 0; i < cost.size(); ++i) {
    auto up = cost, down = cost;
    up[i] += 1e-6;
    down[i] -= 1e-6;
    const double fd = (dtw::soft_dtw(up, 0.7) - dtw::soft_dtw(down, 0.7)) / 2e-6;
    EXPECT_NEAR(e[i], fd, 1e-7);
  }
  // Alignment weights are probabilities of passing through each cell.
  EXPECT_NEAR(e.at(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(e.at(3, 2), 1.0, 1e-12);
}

TEST(SoftDtw, SequenceGradientsPassFiniteDifferences) {
  Rng rng(54);
  const std::pair<std::size_t, std::size_t> sizes[] = {{1, 1}, {2, 3}, {5, 2}, {8, 6}};
  for (const auto& [m, n] : sizes) {
    for (double gamma : {0.1, 1.0}) {
      const auto f = [&](Tape&, const std::vector<Var>& in) { return dtw::soft_dtw(in[0], in[1], gamma); };
      const double err =
          test::max_grad_error(f, {test::random_array({m, 3}, rng), test::random_array({n, 3}, rng)});
      EXPECT_LT(err, 1e-5) << m << "x" << n << " gamma=" << gamma;
    }
  }
}

TEST(SoftDtw, LargeCostsStayFinite) {
  const DenseArray cost({6, 6}, 1e4);
  EXPECT_TRUE(std::isfinite(dtw::soft_dtw(cost, 0.01)));
  EXPECT_NEAR(dtw::soft_dtw(cost, 0.01), dtw::hard_dtw(cost), 1.0);
}

TEST(SoftDtw, Errors) {
  const DenseArray cost({2, 2}, 1.0);
  EXPECT_THROW(dtw::soft_dtw(cost, 0.0), ArgumentError);
  EXPECT_THROW(dtw::soft_dtw(cost, -1.0), ArgumentError);
  EXPECT_THROW(dtw::soft_dtw(DenseArray({0, 2}), 1.0), DimensionError);
}
