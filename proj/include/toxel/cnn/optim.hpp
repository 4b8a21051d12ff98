#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "toxel/error.hpp"

namespace toxel::cnn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First and second moments per parameter buffer, plus the step count.
template <class T>
struct AdamState {
  std::vector<std::vector<T>> m, v;
  std::uint64_t step = 0;

  void init(const std::vector<std::size_t>& sizes) {
    m.assign(sizes.size(), {});
    v.assign(sizes.size(), {});
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      m[i].assign(sizes[i], T(0));
      v[i].assign(sizes[i], T(0));
    }
    step = 0;
  }
};

/// One bias-corrected Adam update over all buffers.
template <class T>
void adam_step(std::vector<std::vector<T>*> params, const std::vector<const std::vector<T>*>& grads,
               AdamState<T>& state, double lr, const AdamConfig& cfg = {}) {
  if (params.size() != grads.size() || state.m.size() != params.size()) {
    throw ShapeError("adam_step: parameter, gradient and state counts differ");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  const T b1 = static_cast<T>(cfg.beta1), b2 = static_cast<T>(cfg.beta2);
  const T step_size = static_cast<T>(lr / c1);
  const T inv_c2 = static_cast<T>(1.0 / c2);
  const T eps = static_cast<T>(cfg.eps);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& p = *params[k];
    const auto& g = *grads[k];
    auto& m = state.m[k];
    auto& v = state.v[k];
    if (g.size() != p.size() || m.size() != p.size()) {
      throw ShapeError("adam_step: buffer sizes differ");
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = b1 * m[i] + (T(1) - b1) * g[i];
      v[i] = b2 * v[i] + (T(1) - b2) * g[i] * g[i];
      p[i] -= step_size * m[i] / (std::sqrt(v[i] * inv_c2) + eps);
    }
  }
}

/// Learning rate for `epoch` (0-based): divided by `factor` once for every
/// drop epoch already reached.
inline double lr_schedule(std::size_t epoch, double base_lr, const std::vector<std::size_t>& drops,
                          double factor = 10.0) {
  double lr = base_lr;
  for (std::size_t d : drops) {
    if (epoch >= d) lr /= factor;
  }
  return lr;
}

}  // namespace toxel::cnn
