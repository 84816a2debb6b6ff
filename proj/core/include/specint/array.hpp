#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace specint {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& s);
std::string shape_str(const Shape& s);

class Array;

/// Index of the largest entry; ties break toward the lowest index.
int argmax_lowest(const Array& scores);

/// Dense row-major array of 64-bit floats. Rank 0 is a scalar (size 1).
/// Value semantics throughout; shape is fixed after construction.
class Array {
 public:
  Array() = default;
  explicit Array(Shape shape);  // zero-filled
  Array(Shape shape, std::vector<double> data);

  static Array scalar(double v);
  static Array full(Shape shape, double v);
  static Array zeros_like(const Array& a) { return Array(a.shape()); }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t dim(std::size_t i) const { return shape_[i]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& vec() { return data_; }
  const std::vector<double>& vec() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  // Rank-2 access.
  double& at(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
  double at(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }

  bool same_shape(const Array& o) const { return shape_ == o.shape_; }
  bool all_finite() const;
  void fill(double v);

  double scalar_value() const;  // throws unless size() == 1

 private:
  Shape shape_;
  std::vector<double> data_;
};

}  // namespace specint
