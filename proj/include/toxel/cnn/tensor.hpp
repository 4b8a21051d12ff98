#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "toxel/error.hpp"

namespace toxel::cnn {

using Shape = std::vector<std::size_t>;

inline std::size_t numel(const Shape& s) {
  return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
}

inline std::string shape_string(const Shape& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + ")";
}

/// Dense row-major array; the last dimension varies fastest.
template <class T>
struct Tensor {
  Shape shape;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(Shape s, T fill = T(0)) : shape(std::move(s)), data(numel(shape), fill) {}
  Tensor(Shape s, std::vector<T> values) : shape(std::move(s)), data(std::move(values)) {
    if (data.size() != numel(shape)) {
      throw ShapeError("tensor buffer of " + std::to_string(data.size()) + " values for shape " +
                       shape_string(shape));
    }
  }

  std::size_t size() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t dim(std::size_t i) const { return shape[i]; }
  T* ptr() { return data.data(); }
  const T* ptr() const { return data.data(); }
  T& operator[](std::size_t i) { return data[i]; }
  T operator[](std::size_t i) const { return data[i]; }

  void zero() { std::fill(data.begin(), data.end(), T(0)); }

  Tensor reshaped(Shape s) const {
    if (numel(s) != size()) {
      throw ShapeError("cannot reshape " + shape_string(shape) + " to " + shape_string(s));
    }
    return Tensor(std::move(s), data);
  }

  template <class U>
  Tensor<U> cast() const {
    return Tensor<U>(shape, std::vector<U>(data.begin(), data.end()));
  }
};

inline void expect_rank(const Shape& s, std::size_t r, const char* what) {
  if (s.size() != r) {
    throw ShapeError(std::string(what) + " expects rank " + std::to_string(r) + ", got " +
                     shape_string(s));
  }
}

}  // namespace toxel::cnn
