#pragma once

// Synthetic sample generation: carve randomly placed cavities into a solid
// 4D cube and label the result analytically.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "toxel/betti.hpp"
#include "toxel/error.hpp"
#include "toxel/grid4.hpp"
#include "toxel/rotation.hpp"
#include "toxel/shapes.hpp"

namespace toxel {

/// Holes a cavity of this kind adds to the solid cube (b0 comes from the cube).
inline BettiVector betti_contribution(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Ball4: return {{0, 0, 0, 1}};
    case ShapeKind::TorusS1B3: return {{0, 0, 1, 1}};
    case ShapeKind::TorusS2B2: return {{0, 1, 0, 1}};
    case ShapeKind::TorusT2B2: return {{0, 1, 2, 1}};
  }
  return {};
}

struct Cavity {
  ShapeSpec shape;
  Vec4 center{};
  Rot4 rot = Rot4::identity();
};

struct SampleLabel {
  BettiVector betti;
  std::vector<Cavity> cavities;
  std::uint64_t seed = 0;
  std::size_t grid_size = 0;
};

struct GenConfig {
  std::size_t grid_size = 128;
  int min_holes = 1;
  int max_holes = 48;
  double spacing = 6.5;
  double boundary_margin = 1.0;
  double a_min = 2.4;
  double a_max = 6.4;
  std::array<double, 4> kind_weights{1.0, 1.0, 1.0, 1.0};
  long max_placement_attempts = 100000;
  int max_per_betti = 16;  // largest b1, b2 or b3 a label may carry

  void validate() const {
    if (grid_size < 3) throw ParameterError("grid_size must be at least 3");
    if (min_holes < 1) throw ParameterError("min_holes must be at least 1");
    if (max_holes < min_holes) throw ParameterError("max_holes must be >= min_holes");
    if (spacing < 0.0) throw ParameterError("spacing must be non-negative");
    if (boundary_margin < 0.0) throw ParameterError("boundary_margin must be non-negative");
    if (max_placement_attempts < 1) throw ParameterError("max_placement_attempts must be positive");
    RadiusRanges{a_min, a_max}.validate();
    bool any = false;
    for (double w : kind_weights) {
      if (w < 0.0) throw ParameterError("kind weights must be non-negative");
      any = any || w > 0.0;
    }
    if (!any) throw ParameterError("at least one kind weight must be positive");
  }
};

/// Toxels that become 0 are those whose integer coordinate q satisfies
/// membership(shape, rot^T (q - center)). Returns how many changed 1 -> 0.
inline std::size_t carve(BinaryGrid& grid, const Cavity& cavity) {
  const double rho = bounding_radius(cavity.shape);
  std::array<std::int64_t, 4> lo{}, hi{};
  for (std::size_t a = 0; a < 4; ++a) {
    lo[a] = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(cavity.center[a] - rho)));
    hi[a] = std::min<std::int64_t>(static_cast<std::int64_t>(grid.extent(a)) - 1,
                                   static_cast<std::int64_t>(std::floor(cavity.center[a] + rho)));
    if (lo[a] > hi[a]) return 0;
  }
  const double rho2 = rho * rho;
  const Dims4& dims = grid.dims();
  std::size_t carved = 0;
  Coord4 q{};
  for (q[3] = lo[3]; q[3] <= hi[3]; ++q[3])
    for (q[2] = lo[2]; q[2] <= hi[2]; ++q[2])
      for (q[1] = lo[1]; q[1] <= hi[1]; ++q[1]) {
        std::size_t idx = dims.index({lo[0], q[1], q[2], q[3]});
        for (q[0] = lo[0]; q[0] <= hi[0]; ++q[0], ++idx) {
          if (grid[idx] == 0) continue;
          const Vec4 d{static_cast<double>(q[0]) - cavity.center[0],
                       static_cast<double>(q[1]) - cavity.center[1],
                       static_cast<double>(q[2]) - cavity.center[2],
                       static_cast<double>(q[3]) - cavity.center[3]};
          if (d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3] > rho2) continue;
          if (membership(cavity.shape, apply_transpose(cavity.rot, d))) {
            grid[idx] = 0;
            ++carved;
          }
        }
      }
  return carved;
}

namespace detail {

// Whether `remaining` further holes can be added to `current` using only the
// enabled kinds while keeping b1, b2, b3 within `cap`.
inline bool hole_target_reachable(const BettiVector& current, int remaining,
                                  const std::array<bool, 4>& enabled, int cap) {
  if (remaining < 0) return false;
  for (int nt = 0; nt <= (enabled[3] ? remaining / 4 : 0); ++nt)
    for (int n1 = 0; n1 <= (enabled[1] ? (remaining - 4 * nt) / 2 : 0); ++n1)
      for (int n2 = 0; n2 <= (enabled[2] ? (remaining - 4 * nt - 2 * n1) / 2 : 0); ++n2) {
        const int nb = remaining - 4 * nt - 2 * n1 - 2 * n2;
        if (nb < 0 || (nb > 0 && !enabled[0])) continue;
        if (current[1] + n2 + nt > cap) continue;
        if (current[2] + n1 + 2 * nt > cap) continue;
        if (current[3] + nb + n1 + n2 + nt > cap) continue;
        return true;
      }
  return false;
}

}  // namespace detail

/// Places cavities into an all-ones cube until the hole count reaches a
/// target drawn uniformly from [min_holes, max_holes]. A placement is
/// accepted when the cavity's bounding ball keeps `boundary_margin` toxels
/// clear of the outer layer and stays `spacing` away from every earlier
/// cavity's bounding ball.
inline std::pair<BinaryGrid, SampleLabel> place_cavities(Rng& rng, const GenConfig& cfg) {
  cfg.validate();
  const RadiusRanges ranges{cfg.a_min, cfg.a_max};
  std::array<bool, 4> enabled{};
  for (std::size_t k = 0; k < 4; ++k) enabled[k] = cfg.kind_weights[k] > 0.0;

  const int target = std::uniform_int_distribution<int>(cfg.min_holes, cfg.max_holes)(rng);

  BinaryGrid grid(Dims4::cube(cfg.grid_size), 1);
  SampleLabel label;
  label.grid_size = cfg.grid_size;
  label.betti = {{1, 0, 0, 0}};

  const double n = static_cast<double>(cfg.grid_size);
  long attempts = 0;
  while (label.betti.holes() < target) {
    const int remaining = target - static_cast<int>(label.betti.holes());
    std::array<double, 4> weights{};
    bool any = false;
    for (std::size_t k = 0; k < 4; ++k) {
      if (!enabled[k]) continue;
      const BettiVector next = label.betti + betti_contribution(kAllShapeKinds[k]);
      const int left = remaining - static_cast<int>(betti_contribution(kAllShapeKinds[k]).holes());
      if (detail::hole_target_reachable(next, left, enabled, cfg.max_per_betti)) {
        weights[k] = cfg.kind_weights[k];
        any = true;
      }
    }
    if (!any) {
      throw PlacementError("no enabled cavity kind can reach the hole target of " +
                               std::to_string(target),
                           attempts);
    }

    for (;;) {
      if (attempts >= cfg.max_placement_attempts) {
        throw PlacementError("cavity placement failed after " + std::to_string(attempts) +
                                 " attempts",
                             attempts);
      }
      ++attempts;
      const auto kind = kAllShapeKinds[static_cast<std::size_t>(
          std::discrete_distribution<int>(weights.begin(), weights.end())(rng))];
      Cavity cav;
      cav.shape = sample_shape(rng, kind, ranges);
      cav.rot = random_rotation(rng);
      const double rho = bounding_radius(cav.shape);
      const double lo = cfg.boundary_margin + rho;
      const double hi = n - 1.0 - cfg.boundary_margin - rho;
      if (lo > hi) continue;
      for (auto& c : cav.center) c = uniform(rng, lo, hi);

      bool clear = true;
      for (const Cavity& other : label.cavities) {
        double d2 = 0.0;
        for (std::size_t a = 0; a < 4; ++a) {
          const double d = cav.center[a] - other.center[a];
          d2 += d * d;
        }
        const double need = rho + bounding_radius(other.shape) + cfg.spacing;
        if (d2 < need * need) {
          clear = false;
          break;
        }
      }
      if (!clear) continue;

      carve(grid, cav);
      label.betti += betti_contribution(kind);
      label.cavities.push_back(cav);
      break;
    }
  }
  return {std::move(grid), std::move(label)};
}

/// SplitMix64 finaliser.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Seed of sample `index` in a batch; independent of worker scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ull));
}

struct Sample {
  BinaryGrid grid;
  SampleLabel label;
};

inline Sample generate_sample(std::uint64_t seed, const GenConfig& cfg) {
  Rng rng(seed);
  auto [grid, label] = place_cavities(rng, cfg);
  label.seed = seed;
  return {std::move(grid), std::move(label)};
}

/// Generates sample `index` of a batch, moving to a freshly derived seed after
/// each placement failure. The label records the seed that succeeded.
inline Sample generate_indexed(std::uint64_t master_seed, std::uint64_t index,
                               const GenConfig& cfg, int retries = 8) {
  std::uint64_t seed = derive_seed(master_seed, index);
  for (int attempt = 0;; ++attempt) {
    try {
      return generate_sample(seed, cfg);
    } catch (const PlacementError&) {
      if (attempt >= retries) throw;
      seed = mix64(seed ^ static_cast<std::uint64_t>(attempt + 1));
    }
  }
}

}  // namespace toxel
