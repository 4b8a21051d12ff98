#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "toxel/betti.hpp"
#include "toxel/cnn/tensor.hpp"
#include "toxel/error.hpp"

namespace toxel::cnn {

using HeadSizes = std::array<std::size_t, 4>;

inline constexpr HeadSizes kDefaultHeads{2, 17, 17, 17};

inline std::size_t total_outputs(const HeadSizes& h) {
  return std::accumulate(h.begin(), h.end(), std::size_t{0});
}

inline void check_target(const BettiVector& t, const HeadSizes& heads) {
  for (std::size_t k = 0; k < 4; ++k) {
    if (t[k] < 0 || static_cast<std::size_t>(t[k]) >= heads[k]) {
      throw LabelError("b" + std::to_string(k) + " = " + std::to_string(t[k]) +
                       " outside the output head range 0.." + std::to_string(heads[k] - 1));
    }
  }
}

template <class T>
struct LossResult {
  T loss = T(0);
  Tensor<T> grad;  // d loss / d logits
};

/// Sum over the four heads of softmax cross-entropy, averaged over the batch.
/// `logits` is (N, sum of head sizes) with the heads laid out consecutively.
template <class T>
LossResult<T> multihead_loss(const Tensor<T>& logits, std::span<const BettiVector> targets,
                             const HeadSizes& heads = kDefaultHeads) {
  expect_rank(logits.shape, 2, "multihead_loss logits");
  const std::size_t N = logits.shape[0];
  const std::size_t width = total_outputs(heads);
  if (logits.shape[1] != width || targets.size() != N) {
    throw ShapeError("multihead_loss: logits " + shape_string(logits.shape) + " with " +
                     std::to_string(targets.size()) + " targets");
  }
  LossResult<T> r{T(0), Tensor<T>(logits.shape)};
  const T inv_n = T(1) / static_cast<T>(N);
  for (std::size_t i = 0; i < N; ++i) {
    check_target(targets[i], heads);
    std::size_t off = i * width;
    for (std::size_t h = 0; h < 4; ++h) {
      const T* z = logits.ptr() + off;
      T* g = r.grad.ptr() + off;
      const T zmax = *std::max_element(z, z + heads[h]);
      T denom = T(0);
      for (std::size_t c = 0; c < heads[h]; ++c) denom += std::exp(z[c] - zmax);
      const auto t = static_cast<std::size_t>(targets[i][h]);
      r.loss += (std::log(denom) + zmax - z[t]) * inv_n;
      for (std::size_t c = 0; c < heads[h]; ++c) {
        g[c] = (std::exp(z[c] - zmax) / denom - (c == t ? T(1) : T(0))) * inv_n;
      }
      off += heads[h];
    }
  }
  return r;
}

/// Per-head argmax; the lowest index wins ties.
template <class T>
std::vector<BettiVector> predict(const Tensor<T>& logits, const HeadSizes& heads = kDefaultHeads) {
  expect_rank(logits.shape, 2, "predict logits");
  const std::size_t width = total_outputs(heads);
  if (logits.shape[1] != width) throw ShapeError("predict: logits width does not match heads");
  std::vector<BettiVector> out(logits.shape[0]);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::size_t off = i * width;
    for (std::size_t h = 0; h < 4; ++h) {
      const T* z = logits.ptr() + off;
      out[i][h] = std::max_element(z, z + heads[h]) - z;
      off += heads[h];
    }
  }
  return out;
}

}  // namespace toxel::cnn
