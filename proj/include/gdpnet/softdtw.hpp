#pragma once

// Soft dynamic time warping with squared-Euclidean ground cost.
//
//   r(i, j) = cost(i, j) + softmin_gamma(r(i-1, j), r(i, j-1), r(i-1, j-1))
//   softmin_gamma(a...) = -gamma * ln sum exp(-a / gamma)
//
// The gradient with respect to the cost matrix is the expected alignment
// matrix, recovered with the backward recursion over the same grid.

#include "gdpnet/dense_array.hpp"
#include "gdpnet/tape.hpp"

namespace gdpnet::dtw {

/// Rows of x (m x d) against rows of y (n x d).
DenseArray squared_distances(const DenseArray& x, const DenseArray& y);

/// Forward DP table, (m+2) x (n+2) with +inf borders; value at (m, n).
struct SoftDtwTable {
  DenseArray r;
  double gamma = 1.0;
  double value() const { return r.at(r.rows() - 2, r.cols() - 2); }
};

SoftDtwTable soft_dtw_table(const DenseArray& cost, double gamma);
double soft_dtw(const DenseArray& cost, double gamma);
double soft_dtw(const DenseArray& x, const DenseArray& y, double gamma);

/// d soft_dtw / d cost (m x n), from a forward table.
DenseArray soft_dtw_alignment(const DenseArray& cost, const SoftDtwTable& table);

/// Classical DTW with a hard min over the same three predecessors.
double hard_dtw(const DenseArray& cost);

/// Differentiable soft-DTW between two node sequences.
Var soft_dtw(const Var& x, const Var& y, double gamma);

}  // namespace gdpnet::dtw
