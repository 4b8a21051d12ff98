#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "toxel/error.hpp"
#include "toxel/grid4.hpp"
#include "toxel/shapes.hpp"

namespace toxel {

/// A 4x4 rotation matrix (orthogonal, determinant +1), row-major.
struct Rot4 {
  std::array<std::array<double, 4>, 4> m{};

  static Rot4 identity() {
    Rot4 r;
    for (int i = 0; i < 4; ++i) r.m[i][i] = 1.0;
    return r;
  }

  /// Rotation by `angle` in the (i, j) coordinate plane, taking e_i towards e_j.
  static Rot4 plane(int i, int j, double angle) {
    Rot4 r = identity();
    const double c = std::cos(angle), s = std::sin(angle);
    r.m[i][i] = c;
    r.m[j][j] = c;
    r.m[j][i] = s;
    r.m[i][j] = -s;
    return r;
  }

  Rot4 transpose() const {
    Rot4 t;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) t.m[i][j] = m[j][i];
    return t;
  }

  std::array<double, 16> row_major() const {
    std::array<double, 16> out{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) out[4 * i + j] = m[i][j];
    return out;
  }

  static Rot4 from_row_major(const std::array<double, 16>& v) {
    Rot4 r;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) r.m[i][j] = v[4 * i + j];
    return r;
  }
};

inline Vec4 apply(const Rot4& r, const Vec4& p) {
  Vec4 out{};
  for (int i = 0; i < 4; ++i) {
    out[i] = r.m[i][0] * p[0] + r.m[i][1] * p[1] + r.m[i][2] * p[2] + r.m[i][3] * p[3];
  }
  return out;
}

inline Vec4 apply_transpose(const Rot4& r, const Vec4& p) {
  Vec4 out{};
  for (int i = 0; i < 4; ++i) {
    out[i] = r.m[0][i] * p[0] + r.m[1][i] * p[1] + r.m[2][i] * p[2] + r.m[3][i] * p[3];
  }
  return out;
}

inline double determinant(const Rot4& r) {
  // Laplace expansion via 2x2 minors of the top and bottom row pairs.
  const auto& a = r.m;
  const double s0 = a[0][0] * a[1][1] - a[1][0] * a[0][1];
  const double s1 = a[0][0] * a[1][2] - a[1][0] * a[0][2];
  const double s2 = a[0][0] * a[1][3] - a[1][0] * a[0][3];
  const double s3 = a[0][1] * a[1][2] - a[1][1] * a[0][2];
  const double s4 = a[0][1] * a[1][3] - a[1][1] * a[0][3];
  const double s5 = a[0][2] * a[1][3] - a[1][2] * a[0][3];
  const double c5 = a[2][2] * a[3][3] - a[3][2] * a[2][3];
  const double c4 = a[2][1] * a[3][3] - a[3][1] * a[2][3];
  const double c3 = a[2][1] * a[3][2] - a[3][1] * a[2][2];
  const double c2 = a[2][0] * a[3][3] - a[3][0] * a[2][3];
  const double c1 = a[2][0] * a[3][2] - a[3][0] * a[2][2];
  const double c0 = a[2][0] * a[3][1] - a[3][0] * a[2][1];
  return s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0;
}

/// Haar-distributed rotation: Gram-Schmidt on a Gaussian matrix gives a
/// uniform element of O(4); flipping one column when det = -1 maps it
/// uniformly onto SO(4).
inline Rot4 random_rotation(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::array<Vec4, 4> cols{};
  for (auto& c : cols)
    for (auto& v : c) v = normal(rng);

  for (int k = 0; k < 4; ++k) {
    // Two passes of modified Gram-Schmidt keep orthogonality near machine precision.
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < k; ++j) {
        double dot = 0.0;
        for (int i = 0; i < 4; ++i) dot += cols[k][i] * cols[j][i];
        for (int i = 0; i < 4; ++i) cols[k][i] -= dot * cols[j][i];
      }
    }
    double norm = 0.0;
    for (double v : cols[k]) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : cols[k]) v /= norm;
  }

  Rot4 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r.m[i][j] = cols[j][i];
  if (determinant(r) < 0.0) {
    for (int i = 0; i < 4; ++i) r.m[i][0] = -r.m[i][0];
  }
  return r;
}

// ---------------------------------------------------------------------------
// Exact quarter-turn rotations of grids.

/// The six coordinate planes, indexed 0..5.
inline constexpr std::array<std::array<int, 2>, 6> kCoordinatePlanes{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

/// Rotates the grid by `quarter_turns` * 90 degrees in coordinate plane
/// `plane` (an index into kCoordinatePlanes). One quarter turn sends the
/// toxel at (p_i, p_j) to (n-1-p_j, p_i).
template <class T>
Grid<T> rotate90(const Grid<T>& g, int plane, int quarter_turns) {
  if (plane < 0 || plane >= 6) throw ParameterError("rotation plane must be 0..5");
  const int i = kCoordinatePlanes[plane][0];
  const int j = kCoordinatePlanes[plane][1];
  if (g.extent(i) != g.extent(j)) {
    throw ShapeError("rotate90 needs equal extents in the rotation plane, got " +
                     std::to_string(g.extent(i)) + " and " + std::to_string(g.extent(j)));
  }
  const int k = ((quarter_turns % 4) + 4) % 4;
  if (k == 0) return g;

  const auto n1 = static_cast<std::int64_t>(g.extent(i)) - 1;
  const Dims4& dims = g.dims();
  Grid<T> out(dims);
  Coord4 q{};
  std::size_t idx = 0;
  for (q[3] = 0; q[3] < static_cast<std::int64_t>(dims[3]); ++q[3])
    for (q[2] = 0; q[2] < static_cast<std::int64_t>(dims[2]); ++q[2])
      for (q[1] = 0; q[1] < static_cast<std::int64_t>(dims[1]); ++q[1])
        for (q[0] = 0; q[0] < static_cast<std::int64_t>(dims[0]); ++q[0], ++idx) {
          Coord4 p = q;
          switch (k) {
            case 1: p[i] = q[j]; p[j] = n1 - q[i]; break;
            case 2: p[i] = n1 - q[i]; p[j] = n1 - q[j]; break;
            case 3: p[i] = n1 - q[j]; p[j] = q[i]; break;
          }
          out[idx] = g[dims.index(p)];
        }
  return out;
}

/// Draws one coordinate plane uniformly and a turn count uniformly in 0..3.
struct QuarterTurn {
  int plane = 0;
  int turns = 0;
};

inline QuarterTurn random_quarter_turn(Rng& rng) {
  std::uniform_int_distribution<int> plane(0, 5), turns(0, 3);
  QuarterTurn q;
  q.plane = plane(rng);
  q.turns = turns(rng);
  return q;
}

}  // namespace toxel
