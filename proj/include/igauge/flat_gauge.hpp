// Normalization of flat connections on S^1 x T^2: temporal gauge, isotropy
// of the holonomy, twist correction, and the resulting degree.
#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "igauge/chern_simons.hpp"
#include "igauge/connection.hpp"

namespace igauge {

struct unsupported_input : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// u(phi_j) over [0, 2pi + margin] as gauge fields on T^2. slices[n_phi] is u(2pi).
template <class G>
struct GaugePath {
  GridSpec sigma;
  std::size_t n_phi = 0;
  double h = 0.0;
  std::vector<GaugeField<G>> slices;
  double max_correction = 0.0;
  bool under_resolved = false;

  const GaugeField<G>& holonomy() const { return slices[n_phi]; }
  std::size_t margin() const { return slices.size() - n_phi - 1; }
};

namespace detail {

inline GridSpec sigma_grid(const GridSpec& g3) { return {{g3.axes[1], g3.axes[2]}}; }

// Six-point Lagrange weights on nodes -2..3 at fractional position t in [0,1).
inline std::array<double, 6> lagrange6(double t) {
  std::array<double, 6> w{};
  for (int m = -2; m <= 3; ++m) {
    double l = 1.0;
    for (int n = -2; n <= 3; ++n)
      if (n != m) l *= (t - n) / double(m - n);
    w[m + 2] = l;
  }
  return w;
}

}  // namespace detail

/// Solves d_phi u = -Psi u from u(0) = 1 along every T^2 point with classic
/// RK4 at step h/4 and reprojection onto the group after every step. Psi is
/// interpolated between grid nodes with periodic six-point Lagrange weights.
template <class G>
GaugePath<G> temporal_gauge(const Connection<G>& B, double correction_tol = 1e-6) {
  require_3d(B.grid);
  constexpr int sub = 4;        // RK4 steps per grid cell
  constexpr int eighth = 2 * sub;  // interpolation points per cell
  GaugePath<G> path;
  path.sigma = detail::sigma_grid(B.grid);
  path.n_phi = B.grid.axes[0].size;
  path.h = B.grid.axes[0].spacing();
  const std::size_t n = path.n_phi, m = std::max<std::size_t>(1, n / 4), nq = path.sigma.points();
  path.slices.assign(n + 1 + m, GaugeField<G>(path.sigma, G::identity()));

  std::array<std::array<double, 6>, eighth> weights;
  for (int k = 0; k < eighth; ++k) weights[k] = detail::lagrange6(double(k) / eighth);

  const double tau = path.h / sub;
  std::vector<Vec3> psi(n * eighth);
  for (std::size_t q = 0; q < nq; ++q) {
    for (std::size_t j = 0; j < n; ++j)
      for (int k = 0; k < eighth; ++k) {
        Vec3 acc{};
        for (int s = 0; s < 6; ++s) {
          const std::size_t jj = (j + n + std::size_t(s) - 2) % n;
          acc += B.comp[0].data[jj * nq + q] * weights[k][s];
        }
        psi[j * eighth + k] = acc;
      }
    auto psi_at = [&](std::size_t e) { return psi[e % (n * eighth)]; };
    auto rhs = [](const Vec3& p, const typename G::Element& u) { return G::algebra_mul(-p, u); };

    typename G::Element u = G::identity();
    for (std::size_t step = 0; step < (n + m) * sub; ++step) {
      const std::size_t e = 2 * step;
      const Vec3 p0 = psi_at(e), p1 = psi_at(e + 1), p2 = psi_at(e + 2);
      const auto k1 = rhs(p0, u);
      const auto k2 = rhs(p1, u + k1 * (0.5 * tau));
      const auto k3 = rhs(p1, u + k2 * (0.5 * tau));
      const auto k4 = rhs(p2, u + k3 * tau);
      const auto next = u + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (tau / 6.0);
      u = G::normalized(next);
      const double corr = G::distance(u, next);
      path.max_correction = std::max(path.max_correction, corr);
      if ((step + 1) % sub == 0) path.slices[(step + 1) / sub].data[q] = u;
    }
  }
  path.under_resolved = path.max_correction > correction_tol;
  return path;
}

/// max over T^2 and the margin of |u(2pi + delta) - u(delta) u(2pi)|
template <class G>
double twisted_periodicity_residual(const GaugePath<G>& path) {
  double r = 0.0;
  const auto& hol = path.holonomy();
  for (std::size_t j = 1; j <= path.margin(); ++j)
    for (std::size_t q = 0; q < path.sigma.points(); ++q)
      r = std::max(r, G::distance(path.slices[path.n_phi + j].data[q], G::mul(path.slices[j].data[q], hol.data[q])));
  return r;
}

/// || h^{-1} A0 h + h^{-1} dh - A0 ||_{L^2(T^2)} for A0 = (A_x, A_y).
template <class G>
double isotropy_check(const GaugeField<G>& h, const AlgebraField& ax, const AlgebraField& ay, int order = 4) {
  if (h.grid.dim() != 2 || !(h.grid == ax.grid) || !(h.grid == ay.grid))
    throw usage_error("isotropy_check expects fields on one T^2 grid");
  const MaurerCartanForm<G> mc = maurer_cartan<G>(h, order);
  ScalarField d(h.grid);
  for (std::size_t p = 0; p < d.size(); ++p) {
    const auto hinv = G::inverse(h.data[p]);
    const Vec3 rx = G::adjoint(hinv, ax.data[p]) + mc.omega[0].data[p] - ax.data[p];
    const Vec3 ry = G::adjoint(hinv, ay.data[p]) + mc.omega[1].data[p] - ay.data[p];
    d.data[p] = norm2(rx) + norm2(ry);
  }
  return std::sqrt(integrate(d));
}

template <class G>
struct TwistResult {
  GaugeField<G> w;
  Vec3 xi;
  double closure_residual = 0.0;  // max |u(2pi) exp(-2pi xi) - 1|
  double holonomy_spread = 0.0;   // max |u(2pi)(q) - mean|
};

/// w(phi) = u(phi) exp(-phi xi) with exp(2 pi xi) = u(2pi), a genuine periodic
/// gauge transformation on S^1 x T^2. Requires u(2pi) constant over T^2 up to
/// `constancy_tol`; xi is taken from the group-projected mean holonomy.
template <class G>
TwistResult<G> twist_correct(const GaugePath<G>& path, const GridSpec& grid3d, double constancy_tol = 1e-2) {
  require_3d(grid3d);
  if (grid3d.axes[0].size != path.n_phi || !(detail::sigma_grid(grid3d) == path.sigma))
    throw usage_error("gauge path does not match the target grid");
  const auto& hol = path.holonomy();
  typename G::Element mean{};
  for (const auto& h : hol.data) mean += h;
  mean = G::normalized(mean * (1.0 / double(hol.size())));

  TwistResult<G> out;
  for (const auto& h : hol.data) out.holonomy_spread = std::max(out.holonomy_spread, G::distance(h, mean));
  if (out.holonomy_spread > constancy_tol)
    throw unsupported_input("holonomy u(2pi) varies over the surface; only constant twists are supported");
  out.xi = G::log(mean).value * (1.0 / (2.0 * std::numbers::pi));
  out.w = GaugeField<G>(grid3d);
  const std::size_t nq = path.sigma.points();
  for (std::size_t j = 0; j < path.n_phi; ++j) {
    const auto v = G::exp(out.xi * (-grid3d.axes[0].coord(j)));
    for (std::size_t q = 0; q < nq; ++q) out.w.data[j * nq + q] = G::mul(path.slices[j].data[q], v);
  }
  const auto v2pi = G::exp(out.xi * (-2.0 * std::numbers::pi));
  for (std::size_t q = 0; q < nq; ++q)
    out.closure_residual = std::max(out.closure_residual, G::distance(G::mul(hol.data[q], v2pi), G::identity()));
  return out;
}

template <class G>
struct FlatNormalization {
  GaugeField<G> w;
  Vec3 xi;
  double cs_B = 0.0;
  double cs_wB = 0.0;
  double cs_residual = 0.0;
  DegreeResult deg_w;
  double isotropy_residual = 0.0;
  double twisted_periodicity = 0.0;
  double closure_residual = 0.0;
  double holonomy_spread = 0.0;
  double twist_term = 0.0;  // integral of <xi, [A0_x, A0_y]> over S^1 x T^2
  CSReport lattice;
  double gauge_residue = 0.0;  // projection residue of w^{-1} dw
  bool consistent = false;    // deg_w matches the lattice point of cs(B)
  bool under_resolved = false;
};

struct FlatTolerances {
  double rk4 = 1e-6;        // reprojection correction that flags the temporal gauge
  double constancy = 1e-2;  // holonomy spread above which the twist is unsupported
  double degree = 0.1;      // distance to an integer that flags the degree
};

template <class G>
FlatNormalization<G> normalize_flat(const Connection<G>& B, int order = 4, const FlatTolerances& tol = {}) {
  require_3d(B.grid);
  const GaugePath<G> path = temporal_gauge(B, tol.rk4);
  const GridSpec sigma = path.sigma;
  const std::size_t nq = sigma.points();

  // A0 is the surface part at phi = 0, where u = 1.
  AlgebraField ax(sigma), ay(sigma);
  for (std::size_t q = 0; q < nq; ++q) {
    ax.data[q] = B.comp[1].data[q];
    ay.data[q] = B.comp[2].data[q];
  }

  FlatNormalization<G> out;
  out.isotropy_residual = isotropy_check(path.holonomy(), ax, ay, order);
  out.twisted_periodicity = twisted_periodicity_residual(path);
  TwistResult<G> tw = twist_correct(path, B.grid, tol.constancy);
  out.xi = tw.xi;
  out.closure_residual = tw.closure_residual;
  out.holonomy_spread = tw.holonomy_spread;

  ScalarField tt(sigma);
  for (std::size_t q = 0; q < nq; ++q) tt.data[q] = dot(tw.xi, G::bracket(ax.data[q], ay.data[q]));
  out.twist_term = 2.0 * std::numbers::pi * integrate(tt);

  const auto applied = gauge_apply_checked(tw.w, B, order);
  out.cs_B = cs(B, order);
  out.cs_wB = cs(applied.conn, order);
  out.cs_residual = std::abs(out.cs_wB);
  out.deg_w = degree<G>(tw.w, order, tol.degree);
  out.lattice = lattice_report(out.cs_B, G::tag);
  out.consistent = out.deg_w.rounded == out.lattice.nearest_lattice;
  out.gauge_residue = applied.max_residue;
  out.under_resolved = path.under_resolved || out.deg_w.under_resolved;
  out.w = std::move(tw.w);
  return out;
}

}  // namespace igauge
