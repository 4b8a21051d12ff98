#pragma once

// Dense 4D toxel grids: storage, indexing, slicing and the TOX4 file format.
//
// Linear index of (x, y, z, w) is ((w * dz + z) * dy + y) * dx + x, so x is
// the fastest-varying axis. Axis numbers used throughout the library follow
// the same order: 0 = x, 1 = y, 2 = z, 3 = w.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "toxel/error.hpp"

namespace toxel {

enum class DType : std::uint8_t { Binary8 = 0, Float32 = 1 };

inline const char* dtype_name(DType d) {
  return d == DType::Binary8 ? "binary8" : "float32";
}

using Coord4 = std::array<std::int64_t, 4>;

struct Dims4 {
  std::array<std::size_t, 4> extent{1, 1, 1, 1};

  static Dims4 cube(std::size_t n) { return Dims4{{n, n, n, n}}; }

  std::size_t operator[](std::size_t axis) const { return extent[axis]; }
  std::size_t size() const {
    return extent[0] * extent[1] * extent[2] * extent[3];
  }
  std::size_t stride(std::size_t axis) const {
    std::size_t s = 1;
    for (std::size_t a = 0; a < axis; ++a) s *= extent[a];
    return s;
  }
  bool contains(const Coord4& c) const {
    for (std::size_t a = 0; a < 4; ++a) {
      if (c[a] < 0 || static_cast<std::size_t>(c[a]) >= extent[a]) return false;
    }
    return true;
  }
  std::size_t index(const Coord4& c) const {
    return ((static_cast<std::size_t>(c[3]) * extent[2] +
             static_cast<std::size_t>(c[2])) *
                extent[1] +
            static_cast<std::size_t>(c[1])) *
               extent[0] +
           static_cast<std::size_t>(c[0]);
  }
  Coord4 coord(std::size_t index) const {
    Coord4 c{};
    for (std::size_t a = 0; a < 4; ++a) {
      c[a] = static_cast<std::int64_t>(index % extent[a]);
      index /= extent[a];
    }
    return c;
  }
  bool operator==(const Dims4&) const = default;
};

inline std::string to_string(const Dims4& d) {
  return std::to_string(d[0]) + "x" + std::to_string(d[1]) + "x" +
         std::to_string(d[2]) + "x" + std::to_string(d[3]);
}

template <class T>
struct DTypeOf;
template <>
struct DTypeOf<std::uint8_t> {
  static constexpr DType value = DType::Binary8;
};
template <>
struct DTypeOf<float> {
  static constexpr DType value = DType::Float32;
};

template <class T>
bool valid_value(T v) {
  if constexpr (std::is_same_v<T, std::uint8_t>) {
    return v == 0 || v == 1;
  } else {
    return v >= T(0) && v <= T(1);  // rejects NaN
  }
}

/// Dense 4D scalar field. Binary grids (uint8_t) hold only 0 and 1, float
/// grids only values in [0, 1].
template <class T>
class Grid {
 public:
  using value_type = T;
  static constexpr DType dtype = DTypeOf<T>::value;

  Grid() = default;

  explicit Grid(Dims4 dims, T fill = T(0)) : dims_(dims) {
    check_dims(dims);
    check_value(fill);
    data_.assign(dims.size(), fill);
  }

  Grid(Dims4 dims, std::vector<T> data) : dims_(dims), data_(std::move(data)) {
    check_dims(dims);
    if (data_.size() != dims.size()) {
      throw ShapeError("grid buffer holds " + std::to_string(data_.size()) +
                       " values, dims " + to_string(dims) + " need " +
                       std::to_string(dims.size()));
    }
    validate();
  }

  const Dims4& dims() const { return dims_; }
  std::size_t size() const { return data_.size(); }
  std::size_t extent(std::size_t axis) const { return dims_[axis]; }

  T get(const Coord4& c) const { return data_[checked_index(c)]; }

  void set(const Coord4& c, T v) {
    check_value(v);
    data_[checked_index(c)] = v;
  }

  // Unchecked linear access.
  T operator[](std::size_t i) const { return data_[i]; }
  T& operator[](std::size_t i) { return data_[i]; }

  std::span<const T> data() const { return data_; }
  std::span<T> data() { return data_; }

  /// Throws if any value violates the dtype invariant.
  void validate() const {
    for (std::size_t i = 0; i < data_.size(); ++i) {
      if (!valid_value(data_[i])) {
        throw DtypeError("grid value at linear index " + std::to_string(i) +
                         " is outside the " + dtype_name(dtype) + " range");
      }
    }
  }

  bool operator==(const Grid& other) const {
    return dims_ == other.dims_ &&
           std::memcmp(data_.data(), other.data_.data(),
                       data_.size() * sizeof(T)) == 0;
  }

 private:
  static void check_dims(const Dims4& d) {
    for (std::size_t a = 0; a < 4; ++a) {
      if (d[a] == 0) throw ShapeError("grid extents must be positive");
    }
  }
  static void check_value(T v) {
    if (!valid_value(v)) {
      throw DtypeError(std::string("value outside the ") + dtype_name(dtype) +
                       " range");
    }
  }
  std::size_t checked_index(const Coord4& c) const {
    if (!dims_.contains(c)) {
      throw BoundsError("coordinate (" + std::to_string(c[0]) + "," +
                        std::to_string(c[1]) + "," + std::to_string(c[2]) +
                        "," + std::to_string(c[3]) + ") outside grid " +
                        to_string(dims_));
    }
    return dims_.index(c);
  }

  Dims4 dims_{};
  std::vector<T> data_;
};

using BinaryGrid = Grid<std::uint8_t>;
using FloatGrid = Grid<float>;
using AnyGrid = std::variant<BinaryGrid, FloatGrid>;

inline DType dtype_of(const AnyGrid& g) {
  return std::holds_alternative<BinaryGrid>(g) ? DType::Binary8
                                               : DType::Float32;
}

inline const Dims4& dims_of(const AnyGrid& g) {
  return std::visit([](const auto& x) -> const Dims4& { return x.dims(); }, g);
}

/// Requires a binary grid; throws DtypeError otherwise.
inline const BinaryGrid& as_binary(const AnyGrid& g) {
  if (const auto* b = std::get_if<BinaryGrid>(&g)) return *b;
  throw DtypeError("operation requires a binary8 grid, got float32");
}

inline BinaryGrid invert(const BinaryGrid& g) {
  BinaryGrid out = g;
  for (auto& v : out.data()) v = static_cast<std::uint8_t>(1 - v);
  return out;
}

inline BinaryGrid invert(const AnyGrid& g) { return invert(as_binary(g)); }

inline std::size_t count_ones(const BinaryGrid& g) {
  return static_cast<std::size_t>(
      std::count(g.data().begin(), g.data().end(), std::uint8_t{1}));
}

/// A 3D sub-grid obtained by fixing one coordinate of a 4D grid. Remaining
/// axes keep their original relative order, first axis fastest.
template <class T>
struct Slice3 {
  std::array<std::size_t, 3> extent{};
  std::array<std::size_t, 3> axes{};  // which 4D axes the three dims came from
  std::vector<T> data;

  std::size_t index(std::size_t a, std::size_t b, std::size_t c) const {
    return (c * extent[1] + b) * extent[0] + a;
  }
  T at(std::size_t a, std::size_t b, std::size_t c) const {
    return data[index(a, b, c)];
  }
};

inline std::array<std::size_t, 3> remaining_axes(std::size_t axis) {
  std::array<std::size_t, 3> r{};
  std::size_t k = 0;
  for (std::size_t a = 0; a < 4; ++a) {
    if (a != axis) r[k++] = a;
  }
  return r;
}

template <class T>
Slice3<T> slice3(const Grid<T>& g, std::size_t axis, std::size_t index) {
  if (axis > 3) {
    throw BoundsError("slice axis " + std::to_string(axis) +
                      " out of range 0..3");
  }
  if (index >= g.extent(axis)) {
    throw BoundsError("slice index " + std::to_string(index) +
                      " out of range for extent " +
                      std::to_string(g.extent(axis)));
  }
  Slice3<T> s;
  s.axes = remaining_axes(axis);
  for (std::size_t k = 0; k < 3; ++k) s.extent[k] = g.extent(s.axes[k]);
  s.data.resize(s.extent[0] * s.extent[1] * s.extent[2]);
  Coord4 c{};
  c[axis] = static_cast<std::int64_t>(index);
  std::size_t i = 0;
  for (std::size_t k2 = 0; k2 < s.extent[2]; ++k2) {
    c[s.axes[2]] = static_cast<std::int64_t>(k2);
    for (std::size_t k1 = 0; k1 < s.extent[1]; ++k1) {
      c[s.axes[1]] = static_cast<std::int64_t>(k1);
      for (std::size_t k0 = 0; k0 < s.extent[0]; ++k0) {
        c[s.axes[0]] = static_cast<std::int64_t>(k0);
        s.data[i++] = g[g.dims().index(c)];
      }
    }
  }
  return s;
}

/// Inverse of slicing every index along `axis`.
template <class T>
Grid<T> restack(std::span<const Slice3<T>> slices, std::size_t axis) {
  if (slices.empty()) throw ShapeError("restack needs at least one slice");
  if (axis > 3) throw BoundsError("restack axis out of range 0..3");
  Dims4 dims;
  const auto axes = remaining_axes(axis);
  for (std::size_t k = 0; k < 3; ++k) dims.extent[axes[k]] = slices[0].extent[k];
  dims.extent[axis] = slices.size();
  Grid<T> g(dims);
  for (std::size_t s = 0; s < slices.size(); ++s) {
    if (slices[s].extent != slices[0].extent) {
      throw ShapeError("restack slices have differing extents");
    }
    Coord4 c{};
    c[axis] = static_cast<std::int64_t>(s);
    std::size_t i = 0;
    for (std::size_t k2 = 0; k2 < slices[s].extent[2]; ++k2) {
      c[axes[2]] = static_cast<std::int64_t>(k2);
      for (std::size_t k1 = 0; k1 < slices[s].extent[1]; ++k1) {
        c[axes[1]] = static_cast<std::int64_t>(k1);
        for (std::size_t k0 = 0; k0 < slices[s].extent[0]; ++k0) {
          c[axes[0]] = static_cast<std::int64_t>(k0);
          g[dims.index(c)] = slices[s].data[i++];
        }
      }
    }
  }
  return g;
}

/// `count` indices spread evenly over [0, n-1], both ends included:
/// round(k * (n - 1) / (count - 1)).
inline std::vector<std::size_t> equally_spaced(std::size_t n, std::size_t count) {
  if (n == 0 || count == 0) return {};
  if (count == 1) return {0};
  std::vector<std::size_t> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    out[k] = static_cast<std::size_t>(std::llround(
        static_cast<double>(k) * static_cast<double>(n - 1) /
        static_cast<double>(count - 1)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// TOX4 file format
//
//   offset  size  field
//   0       4     magic "TOX4"
//   4       4     u32 version (1)
//   8       16    4 x u32 dims in (x, y, z, w) order
//   24      1     u8 dtype (0 = binary8, 1 = float32)
//   25      ...   payload in canonical index order; binary8 one byte per
//                 toxel, float32 four bytes little-endian per toxel
// ---------------------------------------------------------------------------

inline constexpr std::array<char, 4> kGridMagic{'T', 'O', 'X', '4'};
inline constexpr std::uint32_t kGridVersion = 1;
inline constexpr std::size_t kGridHeaderBytes = 25;

namespace detail {

inline void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

inline std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

inline void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

inline std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

}  // namespace detail

template <class T>
void write_grid(std::ostream& out, const Grid<T>& g) {
  std::string header(kGridMagic.begin(), kGridMagic.end());
  detail::put_u32(header, kGridVersion);
  for (std::size_t a = 0; a < 4; ++a) {
    if (g.extent(a) > 0xffffffffu) throw FormatError("grid extent exceeds u32");
    detail::put_u32(header, static_cast<std::uint32_t>(g.extent(a)));
  }
  header.push_back(static_cast<char>(Grid<T>::dtype));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));

  if constexpr (std::is_same_v<T, std::uint8_t>) {
    out.write(reinterpret_cast<const char*>(g.data().data()),
              static_cast<std::streamsize>(g.size()));
  } else if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(g.data().data()),
              static_cast<std::streamsize>(g.size() * sizeof(float)));
  } else {
    std::string buf;
    buf.reserve(g.size() * 4);
    for (float v : g.data()) detail::put_u32(buf, std::bit_cast<std::uint32_t>(v));
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
  if (!out) throw IoError("failed writing grid payload");
}

inline void write_grid(std::ostream& out, const AnyGrid& g) {
  std::visit([&](const auto& x) { write_grid(out, x); }, g);
}

inline AnyGrid read_grid(std::istream& in) {
  std::array<unsigned char, kGridHeaderBytes> h{};
  in.read(reinterpret_cast<char*>(h.data()), h.size());
  if (in.gcount() != static_cast<std::streamsize>(h.size())) {
    throw FormatError("truncated grid header");
  }
  if (std::memcmp(h.data(), kGridMagic.data(), 4) != 0) {
    throw FormatError("bad grid magic (expected TOX4)");
  }
  const std::uint32_t version = detail::get_u32(h.data() + 4);
  if (version != kGridVersion) {
    throw FormatError("unsupported grid version " + std::to_string(version));
  }
  Dims4 dims;
  for (std::size_t a = 0; a < 4; ++a) {
    dims.extent[a] = detail::get_u32(h.data() + 8 + 4 * a);
    if (dims.extent[a] == 0) throw FormatError("grid header has a zero extent");
  }
  const std::uint8_t code = h[24];
  if (code > 1) throw FormatError("unknown grid dtype code " + std::to_string(code));

  const std::size_t n = dims.size();
  const std::size_t width = code == 0 ? 1 : 4;
  std::vector<unsigned char> payload(n * width);
  in.read(reinterpret_cast<char*>(payload.data()),
          static_cast<std::streamsize>(payload.size()));
  if (static_cast<std::size_t>(in.gcount()) != payload.size()) {
    throw FormatError("truncated grid payload: expected " +
                      std::to_string(payload.size()) + " bytes, got " +
                      std::to_string(in.gcount()));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("trailing bytes after grid payload");
  }

  try {
    if (code == 0) {
      return BinaryGrid(dims, std::vector<std::uint8_t>(payload.begin(), payload.end()));
    }
    std::vector<float> values(n);
    for (std::size_t i = 0; i < n; ++i) {
      values[i] = std::bit_cast<float>(detail::get_u32(payload.data() + 4 * i));
    }
    return FloatGrid(dims, std::move(values));
  } catch (const DtypeError& e) {
    throw FormatError(std::string("invalid grid payload: ") + e.what());
  }
}

template <class G>
void write_grid_file(const std::filesystem::path& path, const G& g) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_grid(out, g);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

inline AnyGrid read_grid_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_grid(in);
}

}  // namespace toxel
