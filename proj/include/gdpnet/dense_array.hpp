#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace gdpnet {

/// Row-major array of doubles with an explicit shape. Rank 0 holds a single
/// scalar; rank 1 a vector; rank 2 a matrix. Higher ranks are storable but no
/// op in this library consumes them.
class DenseArray {
 public:
  using Shape = std::vector<std::size_t>;

  DenseArray() : shape_{0}, values_{} {}
  explicit DenseArray(Shape shape, double fill = 0.0);
  DenseArray(Shape shape, std::vector<double> values);

  static DenseArray scalar(double v) { return DenseArray(Shape{}, std::vector<double>{v}); }
  static DenseArray vector(std::vector<double> v) {
    const auto n = v.size();
    return DenseArray(Shape{n}, std::move(v));
  }
  static DenseArray matrix(std::size_t rows, std::size_t cols, std::vector<double> v) {
    return DenseArray(Shape{rows, cols}, std::move(v));
  }
  static DenseArray matrix(std::initializer_list<std::initializer_list<double>> rows);
  static DenseArray identity(std::size_t n);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return values_.size(); }

  // Matrix view of any rank <= 2 array: scalars are 1x1, vectors are 1xn.
  std::size_t rows() const noexcept { return shape_.size() < 2 ? 1 : shape_[0]; }
  std::size_t cols() const noexcept {
    return shape_.empty() ? 1 : shape_.size() == 1 ? shape_[0] : shape_[1];
  }

  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& at(std::size_t r, std::size_t c) noexcept { return values_[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const noexcept { return values_[r * cols() + c]; }

  std::span<double> row(std::size_t r) noexcept { return {values_.data() + r * cols(), cols()}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {values_.data() + r * cols(), cols()};
  }

  double item() const;

  void fill(double v) noexcept;
  bool all_finite() const noexcept;
  bool same_shape(const DenseArray& other) const noexcept { return shape_ == other.shape_; }

  bool operator==(const DenseArray& other) const = default;

 private:
  Shape shape_;
  std::vector<double> values_;
};

std::size_t shape_product(const DenseArray::Shape& shape) noexcept;
std::string shape_string(const DenseArray::Shape& shape);

}  // namespace gdpnet
