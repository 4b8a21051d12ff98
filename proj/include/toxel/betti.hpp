#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace toxel {

/// Betti numbers (b0, b1, b2, b3) of a 4D sample.
struct BettiVector {
  std::array<std::int64_t, 4> b{0, 0, 0, 0};

  std::int64_t& operator[](std::size_t k) { return b[k]; }
  std::int64_t operator[](std::size_t k) const { return b[k]; }

  std::int64_t euler() const { return b[0] - b[1] + b[2] - b[3]; }
  std::int64_t holes() const { return b[1] + b[2] + b[3]; }

  BettiVector& operator+=(const BettiVector& o) {
    for (std::size_t k = 0; k < 4; ++k) b[k] += o.b[k];
    return *this;
  }
  friend BettiVector operator+(BettiVector l, const BettiVector& r) { return l += r; }
  bool operator==(const BettiVector&) const = default;
};

inline std::int64_t euler(const BettiVector& v) { return v.euler(); }

inline std::string to_string(const BettiVector& v) {
  return std::to_string(v[0]) + " " + std::to_string(v[1]) + " " +
         std::to_string(v[2]) + " " + std::to_string(v[3]);
}

}  // namespace toxel
