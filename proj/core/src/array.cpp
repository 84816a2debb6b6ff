#include "specint/array.hpp"

#include <cmath>
#include <stdexcept>

namespace specint {

std::size_t shape_size(const Shape& s) {
  std::size_t n = 1;
  for (std::size_t d : s) n *= d;
  return n;
}

std::string shape_str(const Shape& s) {
  if (s.empty()) return "[scalar]";
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(s[i]);
  }
  out += "]";
  return out;
}

Array::Array(Shape shape) : shape_(std::move(shape)), data_(shape_size(shape_), 0.0) {}

Array::Array(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != shape_size(shape_)) {
    throw std::invalid_argument("Array: data length " + std::to_string(data_.size()) +
                                " does not match shape " + shape_str(shape_));
  }
}

Array Array::scalar(double v) { return Array({}, {v}); }

Array Array::full(Shape shape, double v) {
  Array a(std::move(shape));
  a.fill(v);
  return a;
}

bool Array::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

void Array::fill(double v) {
  for (double& x : data_) x = v;
}

double Array::scalar_value() const {
  if (data_.size() != 1) {
    throw std::logic_error("Array: scalar_value() on shape " + shape_str(shape_));
  }
  return data_[0];
}

int argmax_lowest(const Array& scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = i;
  return static_cast<int>(best);
}

}  // namespace specint
