// Tensor-product grids, fields over them, finite differences and quadrature.
//
// Axis order is (phi, x, y) on S^1 x T^2 and (r, phi, x, y) on the annulus
// domain. Storage is row-major in that order.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "igauge/lie.hpp"

namespace igauge {

struct Axis {
  std::size_t size = 0;
  bool periodic = true;
  double origin = 0.0;
  double extent = 2.0 * std::numbers::pi;

  double spacing() const { return periodic ? extent / double(size) : extent / double(size - 1); }
  double coord(std::size_t i) const { return origin + spacing() * double(i); }
  friend bool operator==(const Axis&, const Axis&) = default;
};

struct GridSpec {
  std::vector<Axis> axes;

  std::size_t dim() const { return axes.size(); }
  std::size_t points() const {
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.size;
    return n;
  }
  std::size_t stride(std::size_t axis) const {
    std::size_t s = 1;
    for (std::size_t k = axis + 1; k < axes.size(); ++k) s *= axes[k].size;
    return s;
  }
  std::size_t index_along(std::size_t flat, std::size_t axis) const {
    return (flat / stride(axis)) % axes[axis].size;
  }
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

inline Axis periodic_axis(std::size_t n) {
  if (n < 5) throw usage_error("periodic axes need at least 5 points");
  return {n, true, 0.0, 2.0 * std::numbers::pi};
}

/// S^1 x T^2 with axes (phi, x, y).
inline GridSpec grid3(std::size_t n_phi, std::size_t n_x, std::size_t n_y) {
  return {{periodic_axis(n_phi), periodic_axis(n_x), periodic_axis(n_y)}};
}
inline GridSpec grid3(std::size_t n) { return grid3(n, n, n); }

/// T^2 with axes (x, y).
inline GridSpec grid2(std::size_t n_x, std::size_t n_y) { return {{periodic_axis(n_x), periodic_axis(n_y)}}; }

/// [r0, R] x S^1 x T^2 with axes (r, phi, x, y).
inline GridSpec grid4(std::size_t n_r, std::size_t n_phi, std::size_t n_x, std::size_t n_y, double r0,
                      double R) {
  if (!(r0 > 0.0) || !(R > r0)) throw usage_error("radial range requires 0 < r0 < R");
  if (n_r < 5) throw usage_error("radial axis needs at least 5 points");
  return {{Axis{n_r, false, r0, R - r0}, periodic_axis(n_phi), periodic_axis(n_x), periodic_axis(n_y)}};
}

template <class T>
struct Field {
  GridSpec grid;
  std::vector<T> data;

  Field() = default;
  explicit Field(GridSpec g, T init = T{}) : grid(std::move(g)), data(grid.points(), init) {}

  T& operator[](std::size_t i) { return data[i]; }
  const T& operator[](std::size_t i) const { return data[i]; }
  std::size_t size() const { return data.size(); }
};

using ScalarField = Field<double>;
using AlgebraField = Field<Vec3>;

// ---------------------------------------------------------------------------
// Finite-difference stencils

struct StencilRow {
  std::array<std::size_t, 5> index{};
  std::array<double, 5> weight{};
  int count = 0;
};

/// Row i of the first-derivative matrix along one axis. Central differences
/// on periodic axes; one-sided stencils of the same order at the ends of a
/// nonperiodic axis.
inline StencilRow stencil_row(const Axis& ax, std::size_t i, int order) {
  StencilRow row;
  const double h = ax.spacing();
  const long n = long(ax.size);
  auto push = [&](long j, double w) {
    row.index[row.count] = std::size_t(j);
    row.weight[row.count] = w / h;
    ++row.count;
  };
  const long ii = long(i);
  if (ax.periodic) {
    auto wrap = [n](long j) { return ((j % n) + n) % n; };
    if (order == 2) {
      push(wrap(ii - 1), -0.5);
      push(wrap(ii + 1), 0.5);
    } else {
      push(wrap(ii - 2), 1.0 / 12.0);
      push(wrap(ii - 1), -8.0 / 12.0);
      push(wrap(ii + 1), 8.0 / 12.0);
      push(wrap(ii + 2), -1.0 / 12.0);
    }
    return row;
  }
  if (order == 2) {
    if (ii == 0) {
      push(0, -1.5), push(1, 2.0), push(2, -0.5);
    } else if (ii == n - 1) {
      push(n - 1, 1.5), push(n - 2, -2.0), push(n - 3, 0.5);
    } else {
      push(ii - 1, -0.5), push(ii + 1, 0.5);
    }
    return row;
  }
  static constexpr double end0[5] = {-25.0 / 12, 48.0 / 12, -36.0 / 12, 16.0 / 12, -3.0 / 12};
  static constexpr double end1[5] = {-3.0 / 12, -10.0 / 12, 18.0 / 12, -6.0 / 12, 1.0 / 12};
  if (ii == 0) {
    for (int k = 0; k < 5; ++k) push(k, end0[k]);
  } else if (ii == 1) {
    for (int k = 0; k < 5; ++k) push(k, end1[k]);
  } else if (ii == n - 1) {
    for (int k = 0; k < 5; ++k) push(n - 1 - k, -end0[k]);
  } else if (ii == n - 2) {
    for (int k = 0; k < 5; ++k) push(n - 1 - k, -end1[k]);
  } else {
    push(ii - 2, 1.0 / 12.0), push(ii - 1, -8.0 / 12.0), push(ii + 1, 8.0 / 12.0), push(ii + 2, -1.0 / 12.0);
  }
  return row;
}

inline void check_order(int order) {
  if (order != 2 && order != 4) throw usage_error("stencil order must be 2 or 4");
}

namespace detail {

template <class T>
constexpr std::size_t doubles_per_value() {
  static_assert(sizeof(T) % sizeof(double) == 0 && std::is_standard_layout_v<T>);
  return sizeof(T) / sizeof(double);
}

// y += w * x over `len` doubles
inline void axpy(double* y, const double* x, double w, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) y[i] += w * x[i];
}

}  // namespace detail

/// First derivative along `axis`.
template <class T>
Field<T> partial(const Field<T>& f, std::size_t axis, int order = 4) {
  check_order(order);
  if (axis >= f.grid.dim()) throw usage_error("axis out of range");
  const Axis& ax = f.grid.axes[axis];
  const std::size_t n = ax.size, s = f.grid.stride(axis), outer = f.size() / (n * s);
  const std::size_t len = s * detail::doubles_per_value<T>();
  Field<T> out(f.grid);
  const double* src = reinterpret_cast<const double*>(f.data.data());
  double* dst = reinterpret_cast<double*>(out.data.data());
  for (std::size_t i = 0; i < n; ++i) {
    const StencilRow row = stencil_row(ax, i, order);
    for (std::size_t o = 0; o < outer; ++o) {
      const std::size_t base = o * n * len;
      for (int k = 0; k < row.count; ++k)
        detail::axpy(dst + base + i * len, src + base + row.index[k] * len, row.weight[k], len);
    }
  }
  return out;
}

/// Transpose of `partial` with respect to the plain Euclidean pairing of arrays.
template <class T>
Field<T> partial_transpose(const Field<T>& g, std::size_t axis, int order = 4) {
  check_order(order);
  if (axis >= g.grid.dim()) throw usage_error("axis out of range");
  const Axis& ax = g.grid.axes[axis];
  const std::size_t n = ax.size, s = g.grid.stride(axis), outer = g.size() / (n * s);
  const std::size_t len = s * detail::doubles_per_value<T>();
  Field<T> out(g.grid);
  const double* src = reinterpret_cast<const double*>(g.data.data());
  double* dst = reinterpret_cast<double*>(out.data.data());
  for (std::size_t i = 0; i < n; ++i) {
    const StencilRow row = stencil_row(ax, i, order);
    for (std::size_t o = 0; o < outer; ++o) {
      const std::size_t base = o * n * len;
      for (int k = 0; k < row.count; ++k)
        detail::axpy(dst + base + row.index[k] * len, src + base + i * len, row.weight[k], len);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Quadrature

/// Per-axis weights: h on periodic axes (trapezoid on a periodic grid);
/// end-corrected trapezoid (Gregory, exact for cubics) on a nonperiodic axis
/// with at least 6 points, plain trapezoid otherwise.
inline std::vector<double> axis_weights(const Axis& ax) {
  const double h = ax.spacing();
  std::vector<double> w(ax.size, h);
  if (ax.periodic) return w;
  if (ax.size >= 6) {
    static constexpr double c[3] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};
    for (int k = 0; k < 3; ++k) {
      w[k] = c[k] * h;
      w[ax.size - 1 - k] = c[k] * h;
    }
  } else {
    w.front() = w.back() = 0.5 * h;
  }
  return w;
}

/// Full tensor-product weights, one per grid point.
inline std::vector<double> point_weights(const GridSpec& g) {
  std::vector<double> w(g.points(), 1.0);
  for (std::size_t a = 0; a < g.dim(); ++a) {
    const auto wa = axis_weights(g.axes[a]);
    const std::size_t n = g.axes[a].size, s = g.stride(a);
    for (std::size_t p = 0; p < w.size(); ++p) w[p] *= wa[(p / s) % n];
  }
  return w;
}

/// Pairwise (tree) summation; the order depends only on the length.
inline double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 16) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

inline double integrate(const ScalarField& density) {
  const auto w = point_weights(density.grid);
  std::vector<double> terms(density.size());
  for (std::size_t p = 0; p < terms.size(); ++p) terms[p] = w[p] * density.data[p];
  return pairwise_sum(terms);
}

/// Coordinate of every point along `axis`.
inline std::vector<double> axis_coords(const GridSpec& g, std::size_t axis) {
  std::vector<double> c(g.axes[axis].size);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = g.axes[axis].coord(i);
  return c;
}

template <class F>
ScalarField make_scalar(const GridSpec& g, F&& fn) {
  ScalarField out(g);
  std::vector<double> x(g.dim());
  for (std::size_t p = 0; p < out.size(); ++p) {
    for (std::size_t a = 0; a < g.dim(); ++a) x[a] = g.axes[a].coord(g.index_along(p, a));
    out.data[p] = fn(std::span<const double>(x));
  }
  return out;
}

}  // namespace igauge
