// Small-matrix kernels for the structure groups SU(2) and SO(3).
//
// Algebra values are stored as coefficients in an orthonormal basis of the
// invariant metric, so inner products are plain dot products:
//   su(2): e_k = (i/sqrt2) sigma_k,  <X,Y> = -tr(XY)
//   so(3): e_k = L_k / 2,            <X,Y> = -2 tr(XY),  (L_k)_ij = -eps_kij
//
// SU(2) elements are quaternions (a,b,c,d) meaning a*1 + i(b s1 + c s2 + d s3).
// SO(3) elements are row-major 3x3 rotation matrices.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace igauge {

struct usage_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Fixed-size real vector with the arithmetic needed by finite differences.
template <std::size_t N>
struct Reals {
  std::array<double, N> v{};

  static constexpr std::size_t size() { return N; }
  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }

  Reals& operator+=(const Reals& o) {
    for (std::size_t i = 0; i < N; ++i) v[i] += o.v[i];
    return *this;
  }
  Reals& operator-=(const Reals& o) {
    for (std::size_t i = 0; i < N; ++i) v[i] -= o.v[i];
    return *this;
  }
  Reals& operator*=(double s) {
    for (auto& x : v) x *= s;
    return *this;
  }
  friend Reals operator+(Reals a, const Reals& b) { return a += b; }
  friend Reals operator-(Reals a, const Reals& b) { return a -= b; }
  friend Reals operator*(Reals a, double s) { return a *= s; }
  friend Reals operator*(double s, Reals a) { return a *= s; }
  friend Reals operator-(Reals a) { return a *= -1.0; }
  friend bool operator==(const Reals&, const Reals&) = default;
};

using Vec3 = Reals<3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]}};
}
template <std::size_t N>
double norm2(const Reals<N>& a) {
  double s = 0.0;
  for (double x : a.v) s += x * x;
  return s;
}
template <std::size_t N>
double norm(const Reals<N>& a) {
  return std::sqrt(norm2(a));
}

enum class GroupTag : std::uint8_t { SU2 = 1, SO3 = 2 };

inline std::string to_string(GroupTag g) { return g == GroupTag::SU2 ? "SU2" : "SO3"; }

inline GroupTag parse_group(const std::string& s) {
  if (s == "SU2" || s == "su2" || s == "SU(2)") return GroupTag::SU2;
  if (s == "SO3" || s == "so3" || s == "SO(3)") return GroupTag::SO3;
  throw usage_error("unknown group tag '" + s + "'");
}

/// lcm{1,...,n}
inline std::uint64_t lcm_upto(unsigned n) {
  if (n == 0) throw usage_error("n_G must be positive");
  std::uint64_t acc = 1;
  for (std::uint64_t k = 2; k <= n; ++k) acc = std::lcm(acc, k);
  return acc;
}

struct GroupInfo {
  GroupTag tag;
  double kappa;
  unsigned n_G;
  std::uint64_t N_G;
};

inline GroupInfo group_constants(GroupTag tag) {
  constexpr double four_pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
  switch (tag) {
    case GroupTag::SU2: return {tag, four_pi2, 2, lcm_upto(2)};
    case GroupTag::SO3: return {tag, four_pi2, 1, lcm_upto(1)};
  }
  throw usage_error("unknown group tag");
}

struct LogResult {
  Vec3 value;
  bool ambiguous = false;  // axis was chosen by convention (angle pi)
};

/// Algebra-valued projection of g^{-1} dg together with the discarded part.
struct MaurerCartan {
  Vec3 value;
  double residue = 0.0;
};

struct SU2 {
  static constexpr GroupTag tag = GroupTag::SU2;
  static constexpr std::size_t n_real = 4;
  using Element = Reals<4>;

  static Element identity() { return {{1.0, 0.0, 0.0, 0.0}}; }

  // Product of two (not necessarily unit) elements of span{1, i sigma_k}.
  static Element mul(const Element& p, const Element& q) {
    const double a1 = p[0], a2 = q[0];
    const Vec3 v1{{p[1], p[2], p[3]}}, v2{{q[1], q[2], q[3]}};
    const Vec3 c = cross(v1, v2);
    return {{a1 * a2 - dot(v1, v2), a1 * v2[0] + a2 * v1[0] - c[0], a1 * v2[1] + a2 * v1[1] - c[1],
             a1 * v2[2] + a2 * v1[2] - c[2]}};
  }
  static Element inverse(const Element& g) { return {{g[0], -g[1], -g[2], -g[3]}}; }

  // xi (as a matrix) times g
  static Element algebra_mul(const Vec3& xi, const Element& g) { return mul(embed(xi), g); }

  static Vec3 bracket(const Vec3& x, const Vec3& y) { return cross(x, y) * (-std::numbers::sqrt2); }

  static Vec3 adjoint(const Element& g, const Vec3& xi) { return extract(mul(mul(g, embed(xi)), inverse(g))); }

  static Element exp(const Vec3& xi) {
    const double n = norm(xi);
    const double theta = n / std::numbers::sqrt2;
    if (n == 0.0) return identity();
    const double s = std::sin(theta) / n;
    return normalized({{std::cos(theta), s * xi[0], s * xi[1], s * xi[2]}});
  }

  // Principal branch, rotation angle in [0, pi]; -1 maps to pi*sqrt2*e_3.
  static LogResult log(const Element& g) {
    const Vec3 v{{g[1], g[2], g[3]}};
    const double s = norm(v);
    const double theta = std::atan2(s, g[0]);
    if (s > 0.0) return {v * (std::numbers::sqrt2 * theta / s), false};
    if (g[0] > 0.0) return {Vec3{}, false};
    return {Vec3{{0.0, 0.0, std::numbers::pi * std::numbers::sqrt2}}, true};
  }

  static MaurerCartan maurer_cartan(const Element& g, const Element& dg) {
    const Element w = mul(inverse(g), dg);
    return {extract(w), std::abs(w[0])};
  }

  static Element normalized(Element g) {
    const double n = norm(g);
    return g * (1.0 / n);
  }
  static double membership_error(const Element& g) { return std::abs(norm2(g) - 1.0); }
  static double distance(const Element& a, const Element& b) { return norm(a - b); }

 private:
  static Element embed(const Vec3& xi) {
    const double s = 1.0 / std::numbers::sqrt2;
    return {{0.0, s * xi[0], s * xi[1], s * xi[2]}};
  }
  static Vec3 extract(const Element& w) {
    return Vec3{{w[1], w[2], w[3]}} * std::numbers::sqrt2;
  }
};

struct SO3 {
  static constexpr GroupTag tag = GroupTag::SO3;
  static constexpr std::size_t n_real = 9;
  using Element = Reals<9>;

  static Element identity() { return {{1, 0, 0, 0, 1, 0, 0, 0, 1}}; }

  static Element mul(const Element& p, const Element& q) {
    Element r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += p[3 * i + k] * q[3 * k + j];
        r[3 * i + j] = s;
      }
    return r;
  }
  static Element transpose(const Element& g) {
    Element r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r[3 * i + j] = g[3 * j + i];
    return r;
  }
  static Element inverse(const Element& g) { return transpose(g); }

  static Element algebra_mul(const Vec3& xi, const Element& g) { return mul(hat(xi * 0.5), g); }

  static Vec3 bracket(const Vec3& x, const Vec3& y) { return cross(x, y) * 0.5; }

  // g (c.L/2) g^T = (gc).L/2
  static Vec3 adjoint(const Element& g, const Vec3& xi) {
    Vec3 r;
    for (int i = 0; i < 3; ++i) r[i] = g[3 * i] * xi[0] + g[3 * i + 1] * xi[1] + g[3 * i + 2] * xi[2];
    return r;
  }

  // Rotation about xi/|xi| by angle |xi|/2.
  static Element exp(const Vec3& xi) {
    const double n = norm(xi);
    if (n == 0.0) return identity();
    const double theta = 0.5 * n;
    const Element K = hat(xi * (1.0 / n));
    const Element K2 = mul(K, K);
    return identity() + K * std::sin(theta) + K2 * (1.0 - std::cos(theta));
  }

  static LogResult log(const Element& g) {
    const double tr = g[0] + g[4] + g[8];
    const double c = std::clamp(0.5 * (tr - 1.0), -1.0, 1.0);
    const double theta = std::acos(c);
    const Vec3 w{{0.5 * (g[7] - g[5]), 0.5 * (g[2] - g[6]), 0.5 * (g[3] - g[1])}};  // sin(theta) * axis
    const double s = norm(w);
    if (theta < 1e-8) return {w * 2.0, false};
    if (std::numbers::pi - theta > 1e-6) return {w * (2.0 * theta / s), false};
    // Near pi: n n^T = (sym(g) - cos(theta) 1) / (1 - cos(theta)), sign from w.
    auto nn = [&](int i, int j) {
      return (0.5 * (g[3 * i + j] + g[3 * j + i]) - (i == j ? c : 0.0)) / (1.0 - c);
    };
    int k = 0;
    for (int i = 1; i < 3; ++i)
      if (nn(i, i) > nn(k, k)) k = i;
    Vec3 axis;
    for (int i = 0; i < 3; ++i) axis[i] = nn(i, k);
    axis *= 1.0 / norm(axis);
    const bool ambiguous = s < 1e-12;
    if (!ambiguous && dot(axis, w) < 0.0) axis = -axis;
    return {axis * (2.0 * theta), ambiguous};
  }

  static MaurerCartan maurer_cartan(const Element& g, const Element& dg) {
    const Element m = mul(transpose(g), dg);
    const Vec3 value{{m[7] - m[5], m[2] - m[6], m[3] - m[1]}};  // 2 * antisymmetric part
    double sym = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double x = 0.5 * (m[3 * i + j] + m[3 * j + i]);
        sym += x * x;
      }
    return {value, std::sqrt(sym)};
  }

  // Polar projection onto O(3) by Newton iteration; det stays +1 near SO(3).
  static Element normalized(Element g) {
    for (int it = 0; it < 4; ++it) {
      const Element gtg = mul(transpose(g), g);
      g = mul(g, identity() * 1.5 - gtg * 0.5);
    }
    return g;
  }
  static double membership_error(const Element& g) {
    const Element d = mul(transpose(g), g) - identity();
    const double det = g[0] * (g[4] * g[8] - g[5] * g[7]) - g[1] * (g[3] * g[8] - g[5] * g[6]) +
                       g[2] * (g[3] * g[7] - g[4] * g[6]);
    return std::max(std::sqrt(norm2(d)), std::abs(det - 1.0));
  }
  static double distance(const Element& a, const Element& b) { return norm(a - b); }

  static Element hat(const Vec3& a) { return {{0, -a[2], a[1], a[2], 0, -a[0], -a[1], a[0], 0}}; }
};

template <class G>
double inner(const Vec3& x, const Vec3& y) {
  return dot(x, y);
}

template <class G>
concept StructureGroup = requires(typename G::Element g, Vec3 x) {
  { G::mul(g, g) } -> std::same_as<typename G::Element>;
  { G::exp(x) } -> std::same_as<typename G::Element>;
  { G::bracket(x, x) } -> std::same_as<Vec3>;
  { G::tag } -> std::convertible_to<GroupTag>;
};

static_assert(StructureGroup<SU2>);
static_assert(StructureGroup<SO3>);

}  // namespace igauge
