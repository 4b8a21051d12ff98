#pragma once

// Reducing grid resolution: strided sampling and block averaging.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "toxel/error.hpp"
#include "toxel/grid4.hpp"

namespace toxel {

enum class DownscaleMode { Stride, AvgPool };

inline std::string_view mode_name(DownscaleMode m) {
  return m == DownscaleMode::Stride ? "stride" : "avgpool";
}

inline std::optional<DownscaleMode> parse_mode(std::string_view s) {
  if (s == "stride") return DownscaleMode::Stride;
  if (s == "avgpool") return DownscaleMode::AvgPool;
  return std::nullopt;
}

struct DownscaleConfig {
  DownscaleMode mode = DownscaleMode::Stride;
  std::size_t factor = 4;
  std::optional<double> threshold;  // re-binarize pooled output when set

  void validate() const {
    if (factor == 0) throw ParameterError("downscale factor must be positive");
    if (threshold && !(*threshold > 0.0 && *threshold < 1.0)) {
      throw ParameterError("binarize threshold must lie in (0, 1)");
    }
  }
};

namespace detail {

inline Dims4 reduced_dims(const Dims4& d, std::size_t factor) {
  if (factor == 0) throw ParameterError("downscale factor must be positive");
  Dims4 out;
  for (std::size_t a = 0; a < 4; ++a) {
    if (d[a] % factor != 0) {
      throw ShapeError("factor " + std::to_string(factor) + " does not divide grid " +
                       to_string(d));
    }
    out.extent[a] = d[a] / factor;
  }
  return out;
}

}  // namespace detail

/// Keeps toxels whose coordinates are all multiples of `factor`.
template <class T>
Grid<T> downsample(const Grid<T>& g, std::size_t factor) {
  const Dims4 od = detail::reduced_dims(g.dims(), factor);
  const Dims4& id = g.dims();
  Grid<T> out(od);
  std::size_t o = 0;
  for (std::size_t w = 0; w < od[3]; ++w)
    for (std::size_t z = 0; z < od[2]; ++z)
      for (std::size_t y = 0; y < od[1]; ++y) {
        std::size_t i = id.index({0, static_cast<std::int64_t>(y * factor),
                                  static_cast<std::int64_t>(z * factor),
                                  static_cast<std::int64_t>(w * factor)});
        for (std::size_t x = 0; x < od[0]; ++x, i += factor) out[o++] = g[i];
      }
  return out;
}

/// Mean over non-overlapping factor^4 blocks.
template <class T>
FloatGrid avgpool(const Grid<T>& g, std::size_t factor) {
  const Dims4 od = detail::reduced_dims(g.dims(), factor);
  const Dims4& id = g.dims();
  std::vector<double> acc(od.size(), 0.0);
  std::size_t i = 0;
  for (std::size_t w = 0; w < id[3]; ++w)
    for (std::size_t z = 0; z < id[2]; ++z)
      for (std::size_t y = 0; y < id[1]; ++y) {
        const std::size_t row = ((w / factor * od[2] + z / factor) * od[1] + y / factor) * od[0];
        for (std::size_t x = 0; x < id[0]; ++x, ++i) acc[row + x / factor] += static_cast<double>(g[i]);
      }
  const double inv = 1.0 / static_cast<double>(factor * factor * factor * factor);
  FloatGrid out(od);
  for (std::size_t k = 0; k < acc.size(); ++k) {
    out[k] = std::min(1.0f, static_cast<float>(acc[k] * inv));
  }
  return out;
}

/// v >= threshold becomes 1, everything else 0.
inline BinaryGrid binarize(const FloatGrid& g, double threshold) {
  BinaryGrid out(g.dims());
  for (std::size_t i = 0; i < g.size(); ++i) {
    out[i] = static_cast<double>(g[i]) >= threshold ? 1 : 0;
  }
  return out;
}

/// Applies a full config. Stride mode keeps the input dtype; pooled output
/// stays float unless a threshold is configured.
inline AnyGrid downscale(const AnyGrid& g, const DownscaleConfig& cfg) {
  cfg.validate();
  if (cfg.mode == DownscaleMode::Stride) {
    return std::visit([&](const auto& x) -> AnyGrid { return downsample(x, cfg.factor); }, g);
  }
  FloatGrid pooled =
      std::visit([&](const auto& x) { return avgpool(x, cfg.factor); }, g);
  if (cfg.threshold) return binarize(pooled, *cfg.threshold);
  return pooled;
}

}  // namespace toxel
