#include "gdpnet/dense_array.hpp"

#include <algorithm>
#include <cmath>

#include "gdpnet/errors.hpp"

namespace gdpnet {

std::size_t shape_product(const DenseArray::Shape& shape) noexcept {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_string(const DenseArray::Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

DenseArray::DenseArray(Shape shape, double fill)
    : shape_(std::move(shape)), values_(shape_product(shape_), fill) {}

DenseArray::DenseArray(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (values_.size() != shape_product(shape_)) {
    throw DimensionError("value count " + std::to_string(values_.size()) +
                         " does not match shape " + shape_string(shape_));
  }
}

DenseArray DenseArray::matrix(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  std::vector<double> v;
  v.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("ragged matrix literal");
    v.insert(v.end(), row.begin(), row.end());
  }
  return DenseArray(Shape{r, c}, std::move(v));
}

DenseArray DenseArray::identity(std::size_t n) {
  DenseArray out(Shape{n, n});
  for (std::size_t i = 0; i < n; ++i) out.at(i, i) = 1.0;
  return out;
}

double DenseArray::item() const {
  if (values_.size() != 1) {
    throw DimensionError("item() on array of shape " + shape_string(shape_));
  }
  return values_[0];
}

void DenseArray::fill(double v) noexcept { std::fill(values_.begin(), values_.end(), v); }

bool DenseArray::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace gdpnet
