#pragma once

// Betti numbers of binary 4D grids.
//
// The complex is the union of the closed unit 4-cubes of all foreground
// toxels together with all of their faces. Cells are stored on the doubled
// ("Khalimsky") lattice: a cell with anchor vertex v and spanned-axis mask m
// sits at coordinate c_i = 2 v_i + m_i, so its dimension is the number of odd
// coordinates. Toxel (x, y, z, w) is the 4-cell at (2x+1, 2y+1, 2z+1, 2w+1).
//
// betti_reduction first removes face pairs that cannot affect homology
// (collapses and coreductions) and then runs a mod-2 column reduction with
// clearing on the cells that remain. Boundary columns are produced on demand
// from the lattice; no global matrix is built.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "toxel/betti.hpp"
#include "toxel/error.hpp"
#include "toxel/grid4.hpp"

namespace toxel {

/// Largest doubled lattice (cells of all dimensions, present or not) the
/// engine accepts. 64^4 grids need 129^4 ~ 2.8e8 cells.
inline constexpr std::uint64_t kDefaultCellBudget = 300'000'000;

struct Cell {
  std::array<std::uint32_t, 4> anchor{};
  std::uint8_t axes = 0;  // bit i set: the cell spans axis i

  int dim() const { return std::popcount(static_cast<unsigned>(axes)); }
  bool operator==(const Cell&) const = default;
};

struct CellCounts {
  std::array<std::uint64_t, 5> n{};

  std::int64_t euler() const {
    return static_cast<std::int64_t>(n[0]) - static_cast<std::int64_t>(n[1]) +
           static_cast<std::int64_t>(n[2]) - static_cast<std::int64_t>(n[3]) +
           static_cast<std::int64_t>(n[4]);
  }
  std::uint64_t total() const { return n[0] + n[1] + n[2] + n[3] + n[4]; }
  bool operator==(const CellCounts&) const = default;
};

class CubicalComplex {
 public:
  using Extent = std::array<std::size_t, 4>;

  // Per-position byte: bit 0 = cell present, bits 1..4 = which lattice
  // coordinates are odd (the spanned axes). The lattice carries one extra
  // layer of absent positions on every side so neighbour lookups need no
  // bounds checks.
  static constexpr std::uint8_t kPresent = 1;

  static CubicalComplex build(const BinaryGrid& grid,
                              std::uint64_t cell_budget = kDefaultCellBudget) {
    CubicalComplex cx;
    std::uint64_t lattice = 1;
    for (std::size_t a = 0; a < 4; ++a) {
      cx.toxels_[a] = grid.extent(a);
      cx.ext_[a] = 2 * grid.extent(a) + 1;
      lattice *= cx.ext_[a];
    }
    if (lattice > cell_budget) {
      throw CapacityError("grid " + to_string(grid.dims()) + " needs " +
                          std::to_string(lattice) +
                          " lattice cells, above the cell budget of " +
                          std::to_string(cell_budget));
    }
    Extent padded{};
    for (std::size_t a = 0; a < 4; ++a) padded[a] = cx.ext_[a] + 2;
    cx.stride_ = {1, padded[0], padded[0] * padded[1], padded[0] * padded[1] * padded[2]};

    // A cell is present iff it touches a foreground toxel. The test is
    // separable, so the lattice is grown one axis at a time.
    std::vector<std::uint8_t> cur(grid.data().begin(), grid.data().end());
    Extent shape = cx.toxels_;
    for (std::size_t a = 0; a < 4; ++a) {
      cur = dilate_axis(cur, shape, a);
      shape[a] = 2 * shape[a] + 1;
    }

    cx.cells_.assign(padded[0] * padded[1] * padded[2] * padded[3], 0);
    std::size_t src = 0;
    for (std::size_t c3 = 0; c3 < cx.ext_[3]; ++c3)
      for (std::size_t c2 = 0; c2 < cx.ext_[2]; ++c2)
        for (std::size_t c1 = 0; c1 < cx.ext_[1]; ++c1) {
          const auto high = static_cast<std::uint8_t>(((c1 & 1) << 2) | ((c2 & 1) << 3) | ((c3 & 1) << 4));
          std::uint8_t* row = cx.cells_.data() + cx.offset({0, c1, c2, c3});
          for (std::size_t c0 = 0; c0 < cx.ext_[0]; ++c0, ++src) {
            row[c0] = static_cast<std::uint8_t>(high | ((c0 & 1) << 1) | cur[src]);
          }
        }
    cx.recount();
    return cx;
  }

  const CellCounts& counts() const { return counts_; }
  const Extent& lattice_extent() const { return ext_; }
  const Extent& grid_extent() const { return toxels_; }

  bool contains(const Cell& c) const {
    Extent k{};
    for (std::size_t a = 0; a < 4; ++a) {
      k[a] = 2 * std::size_t{c.anchor[a]} + ((c.axes >> a) & 1u);
      if (k[a] >= ext_[a]) return false;
    }
    return (cells_[offset(k)] & kPresent) != 0;
  }

  /// The 2k facets of a k-cell: for each spanned axis, the lower and upper face.
  static std::vector<Cell> faces(const Cell& c) {
    std::vector<Cell> out;
    for (std::size_t a = 0; a < 4; ++a) {
      if (!((c.axes >> a) & 1u)) continue;
      Cell lo = c;
      lo.axes = static_cast<std::uint8_t>(c.axes & ~(1u << a));
      Cell hi = lo;
      hi.anchor[a] += 1;
      out.push_back(lo);
      out.push_back(hi);
    }
    return out;
  }

  /// Visits present cells of one dimension ordered by anchor (x fastest,
  /// w slowest), then by axis mask.
  template <class F>
  void for_each_cell(int dim, F&& f) const {
    std::array<std::uint8_t, 16> masks{};
    std::size_t nmasks = 0;
    for (unsigned m = 0; m < 16; ++m) {
      if (std::popcount(m) == dim) masks[nmasks++] = static_cast<std::uint8_t>(m);
    }
    Cell c;
    for (c.anchor[3] = 0; c.anchor[3] <= toxels_[3]; ++c.anchor[3])
      for (c.anchor[2] = 0; c.anchor[2] <= toxels_[2]; ++c.anchor[2])
        for (c.anchor[1] = 0; c.anchor[1] <= toxels_[1]; ++c.anchor[1])
          for (c.anchor[0] = 0; c.anchor[0] <= toxels_[0]; ++c.anchor[0])
            for (std::size_t i = 0; i < nmasks; ++i) {
              c.axes = masks[i];
              if (contains(c)) f(c);
            }
  }

 private:
  friend struct ComplexReducer;

  // Position of unpadded lattice coordinate k in cells_.
  std::size_t offset(const Extent& k) const {
    return (k[0] + 1) * stride_[0] + (k[1] + 1) * stride_[1] + (k[2] + 1) * stride_[2] +
           (k[3] + 1) * stride_[3];
  }

  static std::vector<std::uint8_t> dilate_axis(const std::vector<std::uint8_t>& in,
                                               const Extent& shape, std::size_t axis) {
    std::size_t inner = 1, outer = 1;
    for (std::size_t a = 0; a < axis; ++a) inner *= shape[a];
    for (std::size_t a = axis + 1; a < 4; ++a) outer *= shape[a];
    const std::size_t n = shape[axis];
    const std::size_t k = 2 * n + 1;
    std::vector<std::uint8_t> out(outer * k * inner, 0);
    for (std::size_t o = 0; o < outer; ++o) {
      const std::uint8_t* src = in.data() + o * n * inner;
      std::uint8_t* dst = out.data() + o * k * inner;
      for (std::size_t c = 0; c < k; ++c) {
        std::uint8_t* row = dst + c * inner;
        if (c & 1) {
          std::copy_n(src + (c / 2) * inner, inner, row);
        } else {
          const std::size_t t = c / 2;
          if (t > 0) {
            const std::uint8_t* prev = src + (t - 1) * inner;
            for (std::size_t i = 0; i < inner; ++i) row[i] |= prev[i];
          }
          if (t < n) {
            const std::uint8_t* next = src + t * inner;
            for (std::size_t i = 0; i < inner; ++i) row[i] |= next[i];
          }
        }
      }
    }
    return out;
  }

  void recount() {
    counts_ = {};
    for (std::uint8_t v : cells_) {
      if (v & kPresent) ++counts_.n[static_cast<std::size_t>(std::popcount(static_cast<unsigned>(v >> 1)))];
    }
  }

  Extent toxels_{};
  Extent ext_{};
  Extent stride_{};  // strides of the padded lattice
  std::vector<std::uint8_t> cells_;
  CellCounts counts_;
};

struct ReductionOptions {
  /// Shrink the complex by collapses and coreductions before the matrix
  /// reduction. With false every cell enters the matrix reduction.
  bool collapse = true;
  /// analyze_grid only: merge runs of identical adjacent 3D slices first.
  bool squeeze = true;
};

struct ReductionResult {
  BettiVector betti;
  CellCounts counts;     // cells of the full complex
  CellCounts remaining;  // cells entering the matrix reduction
};

// Reduces the lattice complex in place. Every step removes a pair (s, t)
// with s a facet of t such that either t is the only remaining coface of s
// (a collapse) or s is the only remaining facet of t (a coreduction). Neither
// step changes the boundaries of the cells left behind, so the remaining
// cells with lattice-restricted boundaries carry the same homology, up to
// the seed vertices removed to start the coreductions (one per component,
// each accounting for one unit of b0).
struct ComplexReducer {
  using Extent = CubicalComplex::Extent;
  static constexpr std::uint8_t kPresent = CubicalComplex::kPresent;

  Extent stride;
  std::vector<std::uint8_t>& p;
  std::vector<std::size_t> queue;

  bool present(std::size_t L) const { return (p[L] & kPresent) != 0; }
  static unsigned odd_axes(std::uint8_t v) { return static_cast<unsigned>(v >> 1); }

  void push_neighbours(std::size_t L) {
    for (std::size_t a = 0; a < 4; ++a) {
      if (present(L - stride[a])) queue.push_back(L - stride[a]);
      if (present(L + stride[a])) queue.push_back(L + stride[a]);
    }
  }

  void remove_pair(std::size_t L, std::size_t other) {
    p[L] &= static_cast<std::uint8_t>(~kPresent);
    p[other] &= static_cast<std::uint8_t>(~kPresent);
    push_neighbours(L);
    push_neighbours(other);
  }

  // The unique present neighbour of L along the spanned axes (facets) or
  // the unspanned ones (cofaces); 0 unless exactly one exists.
  std::size_t unique_neighbour(std::size_t L, bool facets) const {
    unsigned axes = odd_axes(p[L]);
    if (!facets) axes = ~axes & 15u;
    std::size_t found = 0;
    int count = 0;
    for (std::size_t a = 0; a < 4; ++a) {
      if (!((axes >> a) & 1u)) continue;
      if (present(L - stride[a])) {
        if (++count > 1) return 0;
        found = L - stride[a];
      }
      if (present(L + stride[a])) {
        if (++count > 1) return 0;
        found = L + stride[a];
      }
    }
    return count == 1 ? found : 0;
  }

  void try_collapse(std::size_t L) {
    if (const std::size_t t = unique_neighbour(L, false)) remove_pair(L, t);
  }

  void try_reduce(std::size_t L) {
    std::size_t t = unique_neighbour(L, true);
    if (!t) t = unique_neighbour(L, false);
    if (t) remove_pair(L, t);
  }

  // Breadth-first. Removals spread as a front; a depth-first order leaves
  // large stuck regions behind.
  template <class Step>
  void drain(Step step) {
    std::size_t head = 0;
    while (head < queue.size()) {
      const std::size_t L = queue[head++];
      if (head >= (std::size_t{1} << 20) && 2 * head >= queue.size()) {
        queue.erase(queue.begin(), queue.begin() + static_cast<std::ptrdiff_t>(head));
        head = 0;
      }
      if (present(L)) step(L);
    }
    queue.clear();
  }

  void collapse_all() {
    for (std::size_t L = 0; L < p.size(); ++L) {
      if (!present(L) || odd_axes(p[L]) == 15u) continue;  // 4-cells have no cofaces
      const std::size_t t = unique_neighbour(L, false);
      if (!t) continue;
      remove_pair(L, t);
      drain([this](std::size_t l) { try_collapse(l); });
    }
  }

  // Removes one vertex per connected component of the remaining 1-skeleton
  // and reduces exhaustively from there. Returns the number of seeds.
  std::int64_t coreduce_all() {
    std::vector<std::size_t> vertices;
    for (std::size_t L = 0; L < p.size(); ++L) {
      if (p[L] == kPresent) vertices.push_back(L);  // present with no odd axis
    }
    if (vertices.empty()) return 0;
    std::vector<std::uint32_t> parent(vertices.size());
    std::iota(parent.begin(), parent.end(), std::uint32_t{0});
    const auto find = [&](std::uint32_t x) {
      while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
      }
      return x;
    };
    const auto vertex_id = [&](std::size_t L) {
      return static_cast<std::uint32_t>(
          std::lower_bound(vertices.begin(), vertices.end(), L) - vertices.begin());
    };
    for (std::uint32_t i = 0; i < vertices.size(); ++i) {
      for (std::size_t a = 0; a < 4; ++a) {
        // The edge towards the next vertex along axis a.
        if (!present(vertices[i] + stride[a])) continue;
        const std::uint32_t r1 = find(i);
        const std::uint32_t r2 = find(vertex_id(vertices[i] + 2 * stride[a]));
        if (r1 != r2) parent[std::max(r1, r2)] = std::min(r1, r2);
      }
    }
    std::int64_t seeds = 0;
    for (std::uint32_t i = 0; i < vertices.size(); ++i) {
      if (find(i) != i) continue;
      ++seeds;
      p[vertices[i]] &= static_cast<std::uint8_t>(~kPresent);
      push_neighbours(vertices[i]);
    }
    drain([this](std::size_t l) { try_reduce(l); });
    return seeds;
  }

  static ReductionResult run(CubicalComplex& complex, const ReductionOptions& options) {
    ReductionResult result;
    result.counts = complex.counts();
    ComplexReducer reducer{complex.stride_, complex.cells_, {}};
    std::int64_t seeds = 0;
    if (options.collapse) {
      reducer.collapse_all();
      seeds = reducer.coreduce_all();
    }
    result.betti = reducer.reduce_matrix(result.remaining);
    result.betti[0] += seeds;
    return result;
  }

  // Mod-2 column reduction with clearing over the present cells, highest
  // dimension first. Rows and columns are ordered by lattice position.
  BettiVector reduce_matrix(CellCounts& remaining) {
    std::array<std::vector<std::size_t>, 5> cells;
    for (std::size_t L = 0; L < p.size(); ++L) {
      if (present(L)) cells[static_cast<std::size_t>(std::popcount(odd_axes(p[L])))].push_back(L);
    }
    for (std::size_t k = 0; k < 5; ++k) remaining.n[k] = cells[k].size();

    std::array<std::uint64_t, 6> rank{};
    std::vector<std::uint8_t> cleared;  // cells of dim k whose column is known to vanish
    std::vector<std::uint8_t> next_cleared;
    std::vector<std::uint32_t> column, merged;
    for (int k = 4; k >= 1; --k) {
      const auto& cols = cells[static_cast<std::size_t>(k)];
      const auto& rows = cells[static_cast<std::size_t>(k - 1)];
      cleared.swap(next_cleared);
      cleared.resize(cols.size(), 0);
      next_cleared.assign(rows.size(), 0);
      std::vector<std::int64_t> owner(rows.size(), -1);
      std::vector<std::vector<std::uint32_t>> reduced(cols.size());

      for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cleared[j]) continue;
        column.clear();
        const unsigned axes = odd_axes(p[cols[j]]);
        for (std::size_t a = 0; a < 4; ++a) {
          if (!((axes >> a) & 1u)) continue;
          for (std::size_t face : {cols[j] - stride[a], cols[j] + stride[a]}) {
            if (!present(face)) continue;
            const auto it = std::lower_bound(rows.begin(), rows.end(), face);
            column.push_back(static_cast<std::uint32_t>(it - rows.begin()));
          }
        }
        std::sort(column.begin(), column.end());
        while (!column.empty() && owner[column.back()] >= 0) {
          const auto& other = reduced[static_cast<std::size_t>(owner[column.back()])];
          merged.clear();
          std::set_symmetric_difference(column.begin(), column.end(), other.begin(),
                                        other.end(), std::back_inserter(merged));
          column.swap(merged);
        }
        if (!column.empty()) {
          owner[column.back()] = static_cast<std::int64_t>(j);
          next_cleared[column.back()] = 1;
          reduced[j] = column;
          ++rank[static_cast<std::size_t>(k)];
        }
      }
    }

    BettiVector b;
    for (std::size_t k = 0; k < 4; ++k) {
      b[k] = static_cast<std::int64_t>(cells[k].size()) -
             static_cast<std::int64_t>(rank[k]) - static_cast<std::int64_t>(rank[k + 1]);
    }
    return b;
  }
};

/// Consumes the complex; pass a copy to keep it.
inline ReductionResult reduce_complex(CubicalComplex complex,
                                      const ReductionOptions& options = {}) {
  return ComplexReducer::run(complex, options);
}

inline BettiVector betti_reduction(const CubicalComplex& complex,
                                   const ReductionOptions& options = {}) {
  return reduce_complex(complex, options).betti;
}

/// Drops every 3D slice that equals its predecessor along the same axis,
/// repeating over all axes until nothing changes. Where slices k and k+1
/// agree, the foreground over that pair is S x [k, k+2] for the slice
/// complex S, so squeezing it to S x [k, k+1] is a homeomorphism and all
/// Betti numbers are kept.
inline BinaryGrid squeeze_repeated_slices(const BinaryGrid& grid) {
  BinaryGrid cur = grid;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t axis = 0; axis < 4; ++axis) {
      const Dims4& d = cur.dims();
      std::size_t inner = 1, outer = 1;
      for (std::size_t a = 0; a < axis; ++a) inner *= d[a];
      for (std::size_t a = axis + 1; a < 4; ++a) outer *= d[a];
      const std::size_t n = d[axis];
      const auto data = cur.data();
      const auto same = [&](std::size_t k) {
        for (std::size_t o = 0; o < outer; ++o) {
          const std::uint8_t* s = data.data() + (o * n + k) * inner;
          if (!std::equal(s, s + inner, s - inner)) return false;
        }
        return true;
      };
      std::vector<std::size_t> keep{0};
      for (std::size_t k = 1; k < n; ++k) {
        if (!same(k)) keep.push_back(k);
      }
      if (keep.size() == n) continue;
      changed = true;
      Dims4 nd = d;
      nd.extent[axis] = keep.size();
      std::vector<std::uint8_t> out;
      out.reserve(nd.size());
      for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t k : keep) {
          const std::uint8_t* s = data.data() + (o * n + k) * inner;
          out.insert(out.end(), s, s + inner);
        }
      cur = BinaryGrid(nd, std::move(out));
    }
  }
  return cur;
}

/// Full pipeline for one grid. `counts` always describes the complex of the
/// grid as given; the reduction itself may run on the squeezed grid.
inline ReductionResult analyze_grid(const BinaryGrid& grid,
                                    std::uint64_t cell_budget = kDefaultCellBudget,
                                    const ReductionOptions& options = {}) {
  if (!options.squeeze) return reduce_complex(CubicalComplex::build(grid, cell_budget), options);
  const CellCounts full = CubicalComplex::build(grid, cell_budget).counts();
  ReductionResult r = reduce_complex(CubicalComplex::build(squeeze_repeated_slices(grid), cell_budget), options);
  r.counts = full;
  return r;
}

inline BettiVector compute_betti(const BinaryGrid& grid,
                                 std::uint64_t cell_budget = kDefaultCellBudget) {
  return analyze_grid(grid, cell_budget).betti;
}

// ---------------------------------------------------------------------------
// Component counting oracles

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::uint32_t{0});
  }

  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // The smaller root wins, so labels do not depend on union order.
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent_[b] = a;
    else parent_[a] = b;
  }

 private:
  std::vector<std::uint32_t> parent_;
};

enum class Connectivity {
  Face,  // toxels sharing a 3-face: 8 neighbours
  Full,  // toxels sharing any vertex: 80 neighbours
};

struct ComponentCount {
  std::size_t total = 0;
  std::size_t touching_boundary = 0;
  std::size_t interior() const { return total - touching_boundary; }
};

/// Counts connected components of toxels equal to `value`.
inline ComponentCount count_components(const BinaryGrid& grid, std::uint8_t value,
                                       Connectivity conn) {
  const Dims4& dims = grid.dims();
  if (dims.size() > 0xffffffffu) throw CapacityError("grid too large for component labelling");

  // Neighbours preceding the current toxel in scan order.
  struct Offset {
    std::array<int, 4> d;
    std::ptrdiff_t linear;
  };
  std::vector<Offset> offsets;
  for (int dw = -1; dw <= 1; ++dw)
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const std::array<int, 4> d{dx, dy, dz, dw};
          const int nonzero = (dx != 0) + (dy != 0) + (dz != 0) + (dw != 0);
          if (nonzero == 0) continue;
          if (conn == Connectivity::Face && nonzero != 1) continue;
          std::ptrdiff_t lin = 0;
          for (std::size_t a = 0; a < 4; ++a)
            lin += d[a] * static_cast<std::ptrdiff_t>(dims.stride(a));
          if (lin < 0) offsets.push_back({d, lin});
        }

  DisjointSet ds(grid.size());
  Coord4 c{};
  std::size_t i = 0;
  const auto ext = [&](std::size_t a) { return static_cast<std::int64_t>(dims[a]); };
  for (c[3] = 0; c[3] < ext(3); ++c[3])
    for (c[2] = 0; c[2] < ext(2); ++c[2])
      for (c[1] = 0; c[1] < ext(1); ++c[1])
        for (c[0] = 0; c[0] < ext(0); ++c[0], ++i) {
          if (grid[i] != value) continue;
          bool interior = true;
          for (std::size_t a = 0; a < 4; ++a)
            interior = interior && c[a] > 0 && c[a] + 1 < ext(a);
          for (const Offset& o : offsets) {
            if (!interior) {
              bool inside = true;
              for (std::size_t a = 0; a < 4; ++a) {
                const auto q = c[a] + o.d[a];
                inside = inside && q >= 0 && q < ext(a);
              }
              if (!inside) continue;
            }
            const auto j = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + o.linear);
            if (grid[j] == value)
              ds.unite(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
          }
        }

  std::vector<std::uint8_t> is_root(grid.size(), 0), on_boundary(grid.size(), 0);
  ComponentCount out;
  i = 0;
  for (c[3] = 0; c[3] < ext(3); ++c[3])
    for (c[2] = 0; c[2] < ext(2); ++c[2])
      for (c[1] = 0; c[1] < ext(1); ++c[1])
        for (c[0] = 0; c[0] < ext(0); ++c[0], ++i) {
          if (grid[i] != value) continue;
          const std::uint32_t r = ds.find(static_cast<std::uint32_t>(i));
          if (!is_root[r]) {
            is_root[r] = 1;
            ++out.total;
          }
          bool border = false;
          for (std::size_t a = 0; a < 4; ++a) border = border || c[a] == 0 || c[a] + 1 == ext(a);
          if (border && !on_boundary[r]) {
            on_boundary[r] = 1;
            ++out.touching_boundary;
          }
        }
  return out;
}

/// Number of foreground components. Two closed 4-cubes sharing only a vertex
/// are connected in the cubical complex, so the default is full connectivity.
inline std::int64_t beta0_unionfind(const BinaryGrid& grid,
                                    Connectivity conn = Connectivity::Full) {
  return static_cast<std::int64_t>(count_components(grid, 1, conn).total);
}

/// b3 by duality: background components (face connectivity) that do not
/// reach the grid boundary. Exact when the outermost toxel layer is foreground.
inline std::int64_t beta3_duality(const BinaryGrid& grid) {
  return static_cast<std::int64_t>(count_components(grid, 0, Connectivity::Face).interior());
}

inline bool boundary_layer_is_foreground(const BinaryGrid& grid) {
  const Dims4& dims = grid.dims();
  Coord4 c{};
  std::size_t i = 0;
  for (c[3] = 0; c[3] < static_cast<std::int64_t>(dims[3]); ++c[3])
    for (c[2] = 0; c[2] < static_cast<std::int64_t>(dims[2]); ++c[2])
      for (c[1] = 0; c[1] < static_cast<std::int64_t>(dims[1]); ++c[1])
        for (c[0] = 0; c[0] < static_cast<std::int64_t>(dims[0]); ++c[0], ++i) {
          bool border = false;
          for (std::size_t a = 0; a < 4; ++a)
            border = border || c[a] == 0 || c[a] + 1 == static_cast<std::int64_t>(dims[a]);
          if (border && grid[i] != 1) return false;
        }
  return true;
}

}  // namespace toxel
