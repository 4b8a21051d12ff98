#pragma once

// Layers of the 4D network with explicit forward and backward passes.
// Activations are laid out (N, C, D0, D1, D2, D3), D3 fastest.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "toxel/cnn/tensor.hpp"
#include "toxel/error.hpp"

namespace toxel::cnn {

template <class T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace detail {

struct ConvGeometry {
  std::size_t n = 0, cin = 0, cout = 0;
  std::array<std::size_t, 4> in{}, k{}, out{};
  std::size_t pad = 0;

  std::size_t in_spatial() const { return in[0] * in[1] * in[2] * in[3]; }
  std::size_t out_spatial() const { return out[0] * out[1] * out[2] * out[3]; }
  std::size_t patch() const { return cin * k[0] * k[1] * k[2] * k[3]; }
  std::size_t lines() const { return out[0] * out[1] * out[2]; }
};

inline ConvGeometry conv_geometry(const Shape& x, const Shape& w, std::size_t pad) {
  expect_rank(x, 6, "conv4d input");
  expect_rank(w, 6, "conv4d weight");
  if (w[1] != x[1]) {
    throw ShapeError("conv4d weight " + shape_string(w) + " does not match input channels of " +
                     shape_string(x));
  }
  ConvGeometry g;
  g.n = x[0];
  g.cin = x[1];
  g.cout = w[0];
  g.pad = pad;
  for (std::size_t a = 0; a < 4; ++a) {
    g.in[a] = x[2 + a];
    g.k[a] = w[2 + a];
    if (g.in[a] + 2 * pad < g.k[a]) throw ShapeError("conv4d kernel larger than padded input");
    g.out[a] = g.in[a] + 2 * pad - g.k[a] + 1;
  }
  return g;
}

// Patch matrix over (ci, k0, k1, k2) rows. Each output line contributes one
// zero-padded input line of width in[3] + 2 pad, so the k3 taps become column
// shifts of the same matrix. `tail` trailing zero columns keep every shifted
// view in bounds.
inline std::size_t padded_width(const ConvGeometry& g) { return g.in[3] + 2 * g.pad; }
inline std::size_t line_rows(const ConvGeometry& g) { return g.cin * g.k[0] * g.k[1] * g.k[2]; }

// Calls f(row, l, src) for every patch row and line of the chunk whose input
// line lies inside the grid; src is that input line (length in[3]).
template <class T, class F>
void for_each_line(const ConvGeometry& g, T* x, std::size_t l0, std::size_t nl, F&& f) {
  const auto pad = static_cast<std::ptrdiff_t>(g.pad);
  std::size_t row = 0;
  for (std::size_t ci = 0; ci < g.cin; ++ci) {
    T* xc = x + ci * g.in_spatial();
    for (std::size_t k0 = 0; k0 < g.k[0]; ++k0)
      for (std::size_t k1 = 0; k1 < g.k[1]; ++k1)
        for (std::size_t k2 = 0; k2 < g.k[2]; ++k2, ++row)
          for (std::size_t l = 0; l < nl; ++l) {
            const std::size_t line = l0 + l;
            const std::size_t o2 = line % g.out[2];
            const std::size_t o1 = (line / g.out[2]) % g.out[1];
            const std::size_t o0 = line / (g.out[2] * g.out[1]);
            const auto i0 = static_cast<std::ptrdiff_t>(o0 + k0) - pad;
            const auto i1 = static_cast<std::ptrdiff_t>(o1 + k1) - pad;
            const auto i2 = static_cast<std::ptrdiff_t>(o2 + k2) - pad;
            if (i0 < 0 || i1 < 0 || i2 < 0 || i0 >= static_cast<std::ptrdiff_t>(g.in[0]) ||
                i1 >= static_cast<std::ptrdiff_t>(g.in[1]) || i2 >= static_cast<std::ptrdiff_t>(g.in[2])) {
              continue;
            }
            f(row, l,
              xc + ((static_cast<std::size_t>(i0) * g.in[1] + static_cast<std::size_t>(i1)) * g.in[2] +
                    static_cast<std::size_t>(i2)) * g.in[3]);
          }
  }
}

template <class T>
void im2col(const ConvGeometry& g, const T* x, std::size_t l0, std::size_t nl, std::size_t cols_per_row, T* cols) {
  const std::size_t wp = padded_width(g);
  std::fill(cols, cols + line_rows(g) * cols_per_row, T(0));
  for_each_line(g, x, l0, nl, [&](std::size_t row, std::size_t l, const T* src) {
    std::copy(src, src + g.in[3], cols + row * cols_per_row + l * wp + g.pad);
  });
}

// Adjoint of im2col: accumulates patch-matrix entries back into dx.
template <class T>
void col2im(const ConvGeometry& g, const T* cols, std::size_t l0, std::size_t nl, std::size_t cols_per_row, T* dx) {
  const std::size_t wp = padded_width(g);
  for_each_line(g, dx, l0, nl, [&](std::size_t row, std::size_t l, T* dst) {
    const T* src = cols + row * cols_per_row + l * wp + g.pad;
    for (std::size_t i = 0; i < g.in[3]; ++i) dst[i] += src[i];
  });
}

// Lines per chunk so that the patch matrix stays around 4M entries.
inline std::size_t lines_per_chunk(const ConvGeometry& g) {
  const std::size_t per_line = line_rows(g) * padded_width(g);
  return std::max<std::size_t>(1, (std::size_t{1} << 22) / std::max<std::size_t>(1, per_line));
}

// Weight slice for tap k3 = s as a contiguous (cout, line_rows) matrix.
template <class T>
RowMat<T> weight_tap(const ConvGeometry& g, const T* w, std::size_t s) {
  const std::size_t R = line_rows(g);
  RowMat<T> m(static_cast<Eigen::Index>(g.cout), static_cast<Eigen::Index>(R));
  for (std::size_t co = 0; co < g.cout; ++co)
    for (std::size_t r = 0; r < R; ++r)
      m(static_cast<Eigen::Index>(co), static_cast<Eigen::Index>(r)) = w[(co * R + r) * g.k[3] + s];
  return m;
}

}  // namespace detail

/// Cross-correlation over the four spatial axes, summed over input channels,
/// plus a per-channel bias. Stride 1, zero padding `pad` on every side.
template <class T>
Tensor<T> conv4d_forward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b,
                         std::size_t pad = 2) {
  const auto g = detail::conv_geometry(x.shape, w.shape, pad);
  if (b.size() != g.cout) throw ShapeError("conv4d bias length does not match output channels");
  Tensor<T> y({g.n, g.cout, g.out[0], g.out[1], g.out[2], g.out[3]});
  const std::size_t S = g.out_spatial();
  const std::size_t R = detail::line_rows(g);
  const std::size_t wp = detail::padded_width(g);
  const std::size_t chunk = detail::lines_per_chunk(g);
  const auto cout = static_cast<Eigen::Index>(g.cout);
  std::vector<RowMat<T>> taps;
  for (std::size_t s = 0; s < g.k[3]; ++s) taps.push_back(detail::weight_tap(g, w.ptr(), s));
  std::vector<T> cols;
  RowMat<T> ext;
  for (std::size_t n = 0; n < g.n; ++n) {
    const T* xn = x.ptr() + n * g.cin * g.in_spatial();
    T* yn = y.ptr() + n * g.cout * S;
    for (std::size_t l0 = 0; l0 < g.lines(); l0 += chunk) {
      const std::size_t nl = std::min(chunk, g.lines() - l0);
      const std::size_t width = nl * wp;
      const std::size_t stride = width + g.k[3];
      cols.resize(R * stride);
      detail::im2col(g, xn, l0, nl, stride, cols.data());
      ext.setZero(cout, static_cast<Eigen::Index>(width));
      for (std::size_t s = 0; s < g.k[3]; ++s) {
        Eigen::Map<const RowMat<T>, 0, Eigen::OuterStride<>> C(
            cols.data() + s, static_cast<Eigen::Index>(R), static_cast<Eigen::Index>(width),
            Eigen::OuterStride<>(static_cast<Eigen::Index>(stride)));
        ext.noalias() += taps[s] * C;
      }
      for (std::size_t co = 0; co < g.cout; ++co) {
        const T* src = ext.data() + co * width;
        T* dst = yn + co * S + l0 * g.out[3];
        for (std::size_t l = 0; l < nl; ++l)
          for (std::size_t j = 0; j < g.out[3]; ++j) dst[l * g.out[3] + j] = src[l * wp + j] + b[co];
      }
    }
  }
  return y;
}

template <class T>
struct ConvGrads {
  Tensor<T> x, w, b;
};

/// Gradients of conv4d_forward. With `input_grad` false, x of the result is
/// left empty.
template <class T>
ConvGrads<T> conv4d_backward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& upstream,
                             std::size_t pad = 2, bool input_grad = true) {
  const auto g = detail::conv_geometry(x.shape, w.shape, pad);
  const Shape expect{g.n, g.cout, g.out[0], g.out[1], g.out[2], g.out[3]};
  if (upstream.shape != expect) {
    throw ShapeError("conv4d upstream gradient " + shape_string(upstream.shape) + ", expected " +
                     shape_string(expect));
  }
  ConvGrads<T> gr{input_grad ? Tensor<T>(x.shape) : Tensor<T>(), Tensor<T>(w.shape), Tensor<T>({g.cout})};
  const std::size_t S = g.out_spatial();
  const std::size_t R = detail::line_rows(g);
  const std::size_t wp = detail::padded_width(g);
  const std::size_t chunk = detail::lines_per_chunk(g);
  const auto cout = static_cast<Eigen::Index>(g.cout);
  std::vector<RowMat<T>> taps, gtaps;
  for (std::size_t s = 0; s < g.k[3]; ++s) {
    taps.push_back(detail::weight_tap(g, w.ptr(), s));
    gtaps.push_back(RowMat<T>::Zero(cout, static_cast<Eigen::Index>(R)));
  }
  std::vector<T> cols, dcols;
  RowMat<T> ext;
  for (std::size_t n = 0; n < g.n; ++n) {
    const T* xn = x.ptr() + n * g.cin * g.in_spatial();
    const T* un = upstream.ptr() + n * g.cout * S;
    for (std::size_t co = 0; co < g.cout; ++co) {
      T s = T(0);
      for (std::size_t p = 0; p < S; ++p) s += un[co * S + p];
      gr.b[co] += s;
    }
    for (std::size_t l0 = 0; l0 < g.lines(); l0 += chunk) {
      const std::size_t nl = std::min(chunk, g.lines() - l0);
      const std::size_t width = nl * wp;
      const std::size_t stride = width + g.k[3];
      cols.resize(R * stride);
      detail::im2col(g, xn, l0, nl, stride, cols.data());
      // Upstream spread onto padded lines; the extra columns stay zero.
      ext.setZero(cout, static_cast<Eigen::Index>(width));
      for (std::size_t co = 0; co < g.cout; ++co) {
        const T* src = un + co * S + l0 * g.out[3];
        T* dst = ext.data() + co * width;
        for (std::size_t l = 0; l < nl; ++l) std::copy(src + l * g.out[3], src + (l + 1) * g.out[3], dst + l * wp);
      }
      if (input_grad) dcols.assign(R * stride, T(0));
      for (std::size_t s = 0; s < g.k[3]; ++s) {
        Eigen::Map<const RowMat<T>, 0, Eigen::OuterStride<>> C(
            cols.data() + s, static_cast<Eigen::Index>(R), static_cast<Eigen::Index>(width),
            Eigen::OuterStride<>(static_cast<Eigen::Index>(stride)));
        gtaps[s].noalias() += ext * C.transpose();
        if (input_grad) {
          Eigen::Map<RowMat<T>, 0, Eigen::OuterStride<>> D(
              dcols.data() + s, static_cast<Eigen::Index>(R), static_cast<Eigen::Index>(width),
              Eigen::OuterStride<>(static_cast<Eigen::Index>(stride)));
          D.noalias() += taps[s].transpose() * ext;
        }
      }
      if (input_grad) detail::col2im(g, dcols.data(), l0, nl, stride, gr.x.ptr() + n * g.cin * g.in_spatial());
    }
  }
  for (std::size_t s = 0; s < g.k[3]; ++s)
    for (std::size_t co = 0; co < g.cout; ++co)
      for (std::size_t r = 0; r < R; ++r)
        gr.w[(co * R + r) * g.k[3] + s] = gtaps[s](static_cast<Eigen::Index>(co), static_cast<Eigen::Index>(r));
  return gr;
}

/// Non-overlapping max pooling with window `k` per spatial axis. `argmax`
/// receives, for every output element, the flat input index it came from;
/// ties go to the first element of the window in scan order.
template <class T>
Tensor<T> maxpool4d(const Tensor<T>& x, std::vector<std::uint32_t>& argmax, std::size_t k = 2) {
  expect_rank(x.shape, 6, "maxpool4d input");
  std::array<std::size_t, 4> in{}, out{};
  for (std::size_t a = 0; a < 4; ++a) {
    in[a] = x.shape[2 + a];
    if (k == 0 || in[a] % k != 0) {
      throw ShapeError("maxpool4d extent " + std::to_string(in[a]) + " not divisible by " +
                       std::to_string(k));
    }
    out[a] = in[a] / k;
  }
  Tensor<T> y({x.shape[0], x.shape[1], out[0], out[1], out[2], out[3]});
  argmax.assign(y.size(), 0);
  const std::size_t planes = x.shape[0] * x.shape[1];
  const std::size_t in_s = in[0] * in[1] * in[2] * in[3];
  std::size_t o = 0;
  for (std::size_t pl = 0; pl < planes; ++pl) {
    const std::size_t base = pl * in_s;
    for (std::size_t o0 = 0; o0 < out[0]; ++o0)
      for (std::size_t o1 = 0; o1 < out[1]; ++o1)
        for (std::size_t o2 = 0; o2 < out[2]; ++o2)
          for (std::size_t o3 = 0; o3 < out[3]; ++o3, ++o) {
            std::size_t best = 0;
            bool first = true;
            for (std::size_t d0 = 0; d0 < k; ++d0)
              for (std::size_t d1 = 0; d1 < k; ++d1)
                for (std::size_t d2 = 0; d2 < k; ++d2)
                  for (std::size_t d3 = 0; d3 < k; ++d3) {
                    const std::size_t i =
                        base + (((o0 * k + d0) * in[1] + o1 * k + d1) * in[2] + o2 * k + d2) * in[3] +
                        o3 * k + d3;
                    if (first || x[i] > x[best]) {
                      best = i;
                      first = false;
                    }
                  }
            y[o] = x[best];
            argmax[o] = static_cast<std::uint32_t>(best);
          }
  }
  return y;
}

template <class T>
Tensor<T> maxpool4d_backward(const Shape& input_shape, const std::vector<std::uint32_t>& argmax,
                             const Tensor<T>& upstream) {
  if (upstream.size() != argmax.size()) {
    throw ShapeError("maxpool4d upstream gradient does not match the pooled shape");
  }
  Tensor<T> dx(input_shape);
  for (std::size_t o = 0; o < argmax.size(); ++o) dx[argmax[o]] += upstream[o];
  return dx;
}

template <class T>
Tensor<T> relu(const Tensor<T>& x) {
  Tensor<T> y = x;
  for (auto& v : y.data) v = v > T(0) ? v : T(0);
  return y;
}

/// Gradient through relu given its input; zero at and below 0.
template <class T>
Tensor<T> relu_backward(const Tensor<T>& x, const Tensor<T>& upstream) {
  if (x.shape != upstream.shape) throw ShapeError("relu upstream gradient shape mismatch");
  Tensor<T> dx(x.shape);
  for (std::size_t i = 0; i < x.size(); ++i) dx[i] = x[i] > T(0) ? upstream[i] : T(0);
  return dx;
}

/// (N, ...) -> (N, features).
template <class T>
Tensor<T> flatten(const Tensor<T>& x) {
  if (x.rank() == 0) throw ShapeError("flatten needs a batch dimension");
  return x.reshaped({x.shape[0], x.size() / x.shape[0]});
}

template <class T>
Tensor<T> flatten_backward(const Shape& input_shape, const Tensor<T>& upstream) {
  return upstream.reshaped(input_shape);
}

/// y = x W^T + b with x (N, F), W (O, F), b (O).
template <class T>
Tensor<T> linear_forward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
  expect_rank(x.shape, 2, "linear input");
  expect_rank(w.shape, 2, "linear weight");
  if (w.shape[1] != x.shape[1] || b.size() != w.shape[0]) {
    throw ShapeError("linear: input " + shape_string(x.shape) + ", weight " + shape_string(w.shape) +
                     ", bias " + shape_string(b.shape));
  }
  const auto N = static_cast<Eigen::Index>(x.shape[0]);
  const auto F = static_cast<Eigen::Index>(x.shape[1]);
  const auto O = static_cast<Eigen::Index>(w.shape[0]);
  Tensor<T> y({x.shape[0], w.shape[0]});
  Eigen::Map<const RowMat<T>> X(x.ptr(), N, F), W(w.ptr(), O, F);
  Eigen::Map<RowMat<T>> Y(y.ptr(), N, O);
  Y.noalias() = X * W.transpose();
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index o = 0; o < O; ++o) Y(i, o) += b[static_cast<std::size_t>(o)];
  return y;
}

template <class T>
struct LinearGrads {
  Tensor<T> x, w, b;
};

template <class T>
LinearGrads<T> linear_backward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& upstream) {
  const auto N = static_cast<Eigen::Index>(x.shape[0]);
  const auto F = static_cast<Eigen::Index>(x.shape[1]);
  const auto O = static_cast<Eigen::Index>(w.shape[0]);
  if (upstream.shape != Shape{x.shape[0], w.shape[0]}) {
    throw ShapeError("linear upstream gradient " + shape_string(upstream.shape) + " mismatch");
  }
  LinearGrads<T> g{Tensor<T>(x.shape), Tensor<T>(w.shape), Tensor<T>({w.shape[0]})};
  Eigen::Map<const RowMat<T>> X(x.ptr(), N, F), W(w.ptr(), O, F), U(upstream.ptr(), N, O);
  Eigen::Map<RowMat<T>> DX(g.x.ptr(), N, F), DW(g.w.ptr(), O, F);
  DX.noalias() = U * W;
  DW.noalias() = U.transpose() * X;
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index o = 0; o < O; ++o) g.b[static_cast<std::size_t>(o)] += U(i, o);
  return g;
}

}  // namespace toxel::cnn
