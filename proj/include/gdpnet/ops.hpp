#pragma once

// Differentiable primitives recorded on a Tape, plus the plain numeric
// helpers they are built from. All matrix ops take rank-2 inputs; vectors
// travel as 1 x n rows unless noted.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "gdpnet/dense_array.hpp"
#include "gdpnet/tape.hpp"

namespace gdpnet {

namespace numeric {
// ln(1 + e^x) via max(x, 0) + ln(1 + e^-|x|).
double softplus(double x) noexcept;
double sigmoid(double x) noexcept;
double log_sum_exp(std::span<const double> xs) noexcept;
DenseArray softplus(const DenseArray& x);
DenseArray row_softmax(const DenseArray& x);
// -log softmax(logits)[label]
double cross_entropy(std::span<const double> logits, std::size_t label);
}  // namespace numeric

namespace ops {

Var matmul(const Var& a, const Var& b);
// a * b^T
Var matmul_nt(const Var& a, const Var& b);
// Adds bias (n values) to every row of x (m x n).
Var add_row_bias(const Var& x, const Var& bias);
// x W + b. x: m x k, W: k x n, b: n values.
Var linear(const Var& x, const Var& w, const Var& b);

Var add(const Var& a, const Var& b);
Var scale(const Var& a, double s);
// Elementwise product with a constant array of the same shape (dropout masks).
Var mul_constant(const Var& a, const DenseArray& c);

Var relu(const Var& x);
Var tanh(const Var& x);
Var softplus(const Var& x);

Var row_softmax(const Var& x);
// Divides each row by its sum. Rows must have positive sums.
Var row_normalize(const Var& x);

Var concat_cols(const std::vector<Var>& parts);
Var gather_rows(const Var& x, std::span<const std::size_t> rows);
// Square sub-matrix x[idx, idx].
Var gather_submatrix(const Var& x, std::span<const std::size_t> idx);
// Picks x(r, c) for each pair; result is a length-k vector.
Var gather_elements(const Var& x, std::span<const std::pair<std::size_t, std::size_t>> at);
// out(i, :) = x(i, :) * g[i]; g has one value per row.
Var scale_rows(const Var& x, const Var& g);
// Column-wise max over rows, 1 x n. Ties route the gradient to the first row.
Var column_max(const Var& x);
Var sum(const Var& x);

Var cross_entropy(const Var& logits, std::size_t label);

}  // namespace ops
}  // namespace gdpnet
