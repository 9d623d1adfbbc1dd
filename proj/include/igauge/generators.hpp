// Deterministic generators for the test corpora: flat normal forms, bump
// gauge transformations of prescribed degree, and bandlimited random fields.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "igauge/connection.hpp"

namespace igauge {

/// mt19937_64 with a platform-independent mapping to doubles.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  long integer(long lo, long hi) { return lo + long(engine_() % std::uint64_t(hi - lo + 1)); }

  Vec3 unit_vector() {
    for (;;) {
      Vec3 v{{uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)}};
      const double n = norm(v);
      if (n > 1e-3 && n <= 1.0) return v * (1.0 / n);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Constant commuting connection a n dx + b n dy + c n dphi.
template <class G>
Connection<G> gen_flat(const GridSpec& grid, std::uint64_t seed) {
  if (grid.dim() != 3) throw usage_error("gen_flat expects a 3d grid");
  Rng rng(seed);
  const Vec3 n = rng.unit_vector();
  const double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1), c = rng.uniform(-1, 1);
  Connection<G> B(grid);
  B.comp[0] = AlgebraField(grid, n * c);
  B.comp[1] = AlgebraField(grid, n * a);
  B.comp[2] = AlgebraField(grid, n * b);
  return B;
}

struct Bump {
  std::array<double, 3> center{};  // (phi, x, y)
  double radius = 1.0;
  int sign = 1;
};

/// 6t^5 - 15t^4 + 10t^3 clamped to [0,1]; C^2 at both ends.
inline double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

/// Bumps realizing degree d in {-2..2}: one centred ball for |d| = 1; for
/// |d| = 2 two balls offset by (pi, pi) in (x, y), wrapping periodically in
/// x and y. Every ball stays clear of the phi = 0 slice.
inline std::vector<Bump> standard_bumps(int degree) {
  if (degree < -2 || degree > 2) throw usage_error("standard bumps cover degrees -2..2");
  const double pi = std::numbers::pi;
  const int sign = degree >= 0 ? 1 : -1;
  if (degree == 0) return {};
  if (std::abs(degree) == 1) return {Bump{{pi, pi, pi}, 2.9, sign}};
  const double rho = 2.3, phi1 = 2.33;
  return {Bump{{phi1, 0.5 * pi, 0.5 * pi}, rho, sign}, Bump{{2 * pi - phi1, 1.5 * pi, 1.5 * pi}, rho, sign}};
}

namespace detail {
// Displacement p - c, minimum image on periodic axes.
inline Vec3 displacement(const GridSpec& grid, const std::array<double, 3>& p, const std::array<double, 3>& c) {
  Vec3 d;
  for (int a = 0; a < 3; ++a) {
    double v = p[a] - c[a];
    const double L = grid.axes[a].extent;
    if (grid.axes[a].periodic) v -= L * std::round(v / L);
    d[a] = v;
  }
  return d;
}
}  // namespace detail

/// Balls must be disjoint on the torus and smaller than half of every period.
inline void validate_bumps(const GridSpec& grid, const std::vector<Bump>& bumps) {
  if (grid.dim() != 3) throw usage_error("bump gauge fields live on the 3d grid");
  for (std::size_t i = 0; i < bumps.size(); ++i) {
    const Bump& b = bumps[i];
    if (!(b.radius > 0.0) || (b.sign != 1 && b.sign != -1)) throw usage_error("bad bump parameters");
    for (std::size_t a = 0; a < 3; ++a)
      if (b.radius >= 0.5 * grid.axes[a].extent) throw usage_error("bump ball wraps onto itself");
    for (std::size_t j = 0; j < i; ++j)
      if (norm(detail::displacement(grid, b.center, bumps[j].center)) < b.radius + bumps[j].radius)
        throw usage_error("bump balls overlap");
  }
}

namespace detail {
// Orientation: with volume form dphi^dx^dy the identity direction map has
// degree -1 under the Maurer-Cartan integral, so a positive bump reflects one
// axis. Pinned by the bump-degree tests.
inline Vec3 bump_direction(const Vec3& phat, int sign) {
  return sign > 0 ? Vec3{{-phat[0], phat[1], phat[2]}} : phat;
}
}  // namespace detail

/// u = -1 outside the balls (identity for SO(3)); inside, the radial
/// suspension exp(angle(g(|p-p0|/rho)) * e(p_hat)) with g the smoothstep.
template <class G>
GaugeField<G> gen_bump_gauge(const GridSpec& grid, const std::vector<Bump>& bumps) {
  validate_bumps(grid, bumps);
  // SU(2): |xi| = pi sqrt2 reaches -1; SO(3): |xi| = 4 pi is a full turn.
  const double full = G::tag == GroupTag::SU2 ? std::numbers::pi * std::numbers::sqrt2 : 4.0 * std::numbers::pi;
  const typename G::Element outside = G::exp(Vec3{{0.0, 0.0, full}});
  GaugeField<G> u(grid, outside);
  for (std::size_t p = 0; p < u.size(); ++p) {
    const std::array<double, 3> x{grid.axes[0].coord(grid.index_along(p, 0)),
                                  grid.axes[1].coord(grid.index_along(p, 1)),
                                  grid.axes[2].coord(grid.index_along(p, 2))};
    for (const Bump& b : bumps) {
      const Vec3 d = detail::displacement(grid, x, b.center);
      const double s = norm(d) / b.radius;
      if (s >= 1.0) continue;
      if (s == 0.0) {
        u.data[p] = G::identity();
        break;
      }
      const Vec3 dir = detail::bump_direction(d * (1.0 / norm(d)), b.sign);
      u.data[p] = G::exp(dir * (full * smoothstep(s)));
      break;
    }
  }
  return u;
}

namespace detail {

struct Mode {
  std::array<int, 3> k{};  // wave numbers along the periodic axes
  double phase = 0.0;
  std::array<double, 3> amp{};  // polynomial coefficients in the radial variable
};

inline std::vector<Mode> draw_modes(Rng& rng, int bandlimit, double amplitude, int count, bool radial) {
  std::vector<Mode> modes(count);
  const double scale = amplitude / std::sqrt(double(count));
  for (auto& m : modes) {
    for (auto& k : m.k) k = int(rng.integer(-bandlimit, bandlimit));
    m.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    m.amp[0] = scale * rng.uniform(-1, 1);
    m.amp[1] = radial ? scale * rng.uniform(-1, 1) : 0.0;
    m.amp[2] = radial ? scale * rng.uniform(-1, 1) : 0.0;
  }
  return modes;
}

}  // namespace detail

/// Bandlimited random algebra-valued fields, one per grid axis. On the 4d
/// grid the radial dependence is quadratic in t = (r - r0)/(R - r0).
template <class G>
Connection<G> gen_random_conn(const GridSpec& grid, std::uint64_t seed, int bandlimit, double amplitude) {
  if (grid.dim() != 3 && grid.dim() != 4) throw usage_error("random connections need a 3d or 4d grid");
  if (bandlimit < 0) throw usage_error("bandlimit must be nonnegative");
  const std::size_t first_periodic = grid.dim() - 3;
  for (std::size_t a = first_periodic; a < grid.dim(); ++a)
    if (std::size_t(4 * bandlimit) > grid.axes[a].size) throw usage_error("bandlimit exceeds size/4");
  const bool radial = grid.dim() == 4;
  constexpr int modes_per_field = 4;

  Rng rng(seed);
  Connection<G> c(grid);
  for (std::size_t mu = 0; mu < grid.dim(); ++mu)
    for (int e = 0; e < 3; ++e) {
      const auto modes = detail::draw_modes(rng, bandlimit, amplitude, modes_per_field, radial);
      if (amplitude == 0.0) continue;
      for (std::size_t p = 0; p < grid.points(); ++p) {
        double t = 0.0;
        if (radial) {
          const Axis& ar = grid.axes[0];
          t = (ar.coord(grid.index_along(p, 0)) - ar.origin) / ar.extent;
        }
        double x[3];
        for (int a = 0; a < 3; ++a) x[a] = grid.axes[first_periodic + a].coord(grid.index_along(p, first_periodic + a));
        double v = 0.0;
        for (const auto& m : modes) {
          const double arg = m.k[0] * x[0] + m.k[1] * x[1] + m.k[2] * x[2] + m.phase;
          v += (m.amp[0] + t * (m.amp[1] + t * m.amp[2])) * std::cos(arg);
        }
        c.comp[mu].data[p][e] = v;
      }
    }
  return c;
}

/// Smooth random gauge transformation exp(X) with X a bandlimited algebra field.
template <class G>
GaugeField<G> gen_random_gauge(const GridSpec& grid, std::uint64_t seed, int bandlimit, double amplitude) {
  const Connection<G> x = gen_random_conn<G>(grid, seed ^ 0x9e3779b97f4a7c15ULL, bandlimit, amplitude);
  GaugeField<G> u(grid);
  for (std::size_t p = 0; p < u.size(); ++p) u.data[p] = G::exp(x.comp[0].data[p]);
  return u;
}

}  // namespace igauge
