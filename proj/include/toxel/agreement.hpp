#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "toxel/betti.hpp"
#include "toxel/error.hpp"

namespace toxel {

/// Percentages in [0, 100].
struct AgreementReport {
  std::array<double, 4> per_beta{};
  double combined = 0.0;
  double complete = 0.0;
  std::size_t count = 0;
};

inline double combined_accuracy(const std::array<double, 4>& per_beta) {
  return (per_beta[0] + per_beta[1] + per_beta[2] + per_beta[3]) / 4.0;
}

/// Half-up rounding to two decimals. The small nudge keeps values such as
/// 90.695, which are stored just below their decimal value, rounding up.
inline double round2(double v) {
  return std::floor(v * 100.0 + 0.5 + 1e-9) / 100.0;
}

inline AgreementReport agreement(std::span<const BettiVector> labels,
                                 std::span<const BettiVector> computed) {
  if (labels.size() != computed.size()) {
    throw ShapeError("agreement needs equal-length lists, got " + std::to_string(labels.size()) +
                     " labels and " + std::to_string(computed.size()) + " results");
  }
  AgreementReport r;
  r.count = labels.size();
  if (r.count == 0) return r;
  std::array<std::size_t, 4> hits{};
  std::size_t all = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    bool every = true;
    for (std::size_t k = 0; k < 4; ++k) {
      if (labels[i][k] == computed[i][k]) {
        ++hits[k];
      } else {
        every = false;
      }
    }
    if (every) ++all;
  }
  const double n = static_cast<double>(r.count);
  for (std::size_t k = 0; k < 4; ++k) r.per_beta[k] = 100.0 * static_cast<double>(hits[k]) / n;
  r.combined = combined_accuracy(r.per_beta);
  r.complete = 100.0 * static_cast<double>(all) / n;
  return r;
}

}  // namespace toxel
