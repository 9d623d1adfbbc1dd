// Four-dimensional quantities on the annulus domain [r0,R] x S^1 x T^2:
// energy, topological charge, self-dual/anti-self-dual split, the polar ASD
// residual, a relaxation solver for the self-dual energy and radial profiles.
//
// Orientation: dr ^ dphi ^ dx ^ dy. Orthonormal coframe (dr, r dphi, dx, dy),
// numbered 1..4. Hodge star on T^2: *dx = dy, *dy = -dx, *(dx ^ dy) = 1.
#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "igauge/chern_simons.hpp"
#include "igauge/connection.hpp"

namespace igauge {

namespace axis4 {
inline constexpr std::size_t r = 0, phi = 1, x = 2, y = 3;
}

inline void require_4d(const GridSpec& g) {
  if (g.dim() != 4 || g.axes[0].periodic) throw usage_error("expected a field on the 4d grid (r, phi, x, y)");
}

/// Radius at every grid point.
inline std::vector<double> radius_field(const GridSpec& g) {
  std::vector<double> r(g.points());
  for (std::size_t p = 0; p < r.size(); ++p) r[p] = g.axes[0].coord(g.index_along(p, 0));
  return r;
}

/// B(r) = A(r) + Psi(r) dphi at one radial index; the dr component is dropped.
template <class G>
Connection<G> split_polar(const Connection<G>& xi, std::size_t r_index) {
  require_4d(xi.grid);
  if (r_index >= xi.grid.axes[0].size) throw usage_error("radial index out of range");
  const GridSpec g3{{xi.grid.axes[1], xi.grid.axes[2], xi.grid.axes[3]}};
  Connection<G> b(g3);
  const std::size_t n = g3.points(), off = r_index * n;
  for (std::size_t c = 0; c < 3; ++c)
    std::copy_n(xi.comp[c + 1].data.begin() + std::ptrdiff_t(off), n, b.comp[c].data.begin());
  return b;
}

/// Frame components f_ij of the curvature at one point.
struct FrameCurvature {
  Vec3 f12, f13, f14, f23, f24, f34;
};

// 4d pair order: (r phi), (r x), (r y), (phi x), (phi y), (x y)
inline FrameCurvature frame_components(const Curvature& F, std::size_t p, double r) {
  const double ir = 1.0 / r;
  const auto& c = F.comp;
  return {c[0].data[p] * ir, c[1].data[p], c[2].data[p], c[3].data[p] * ir, c[4].data[p] * ir, c[5].data[p]};
}

/// F+ = (F + *F)/2 and F- = (F - *F)/2 as three components each, scaled so
/// that |F|^2 = |F+|^2 + |F-|^2 pointwise with the 2-form norm.
struct SelfDualSplit {
  GridSpec grid;
  std::array<AlgebraField, 3> plus, minus;
};

inline SelfDualSplit self_dual_split(const Curvature& F) {
  SelfDualSplit s{F.grid, {AlgebraField(F.grid), AlgebraField(F.grid), AlgebraField(F.grid)},
                  {AlgebraField(F.grid), AlgebraField(F.grid), AlgebraField(F.grid)}};
  const auto r = radius_field(F.grid);
  const double c = 1.0 / std::numbers::sqrt2;
  for (std::size_t p = 0; p < r.size(); ++p) {
    const FrameCurvature f = frame_components(F, p, r[p]);
    s.plus[0].data[p] = (f.f12 + f.f34) * c;
    s.plus[1].data[p] = (f.f13 - f.f24) * c;
    s.plus[2].data[p] = (f.f14 + f.f23) * c;
    s.minus[0].data[p] = (f.f12 - f.f34) * c;
    s.minus[1].data[p] = (f.f13 + f.f24) * c;
    s.minus[2].data[p] = (f.f14 - f.f23) * c;
  }
  return s;
}

/// Pointwise |F|^2 in the orthonormal frame.
inline ScalarField curvature_density(const Curvature& F) {
  ScalarField d(F.grid);
  const auto r = radius_field(F.grid);
  for (std::size_t p = 0; p < d.size(); ++p) {
    const FrameCurvature f = frame_components(F, p, r[p]);
    d.data[p] = norm2(f.f12) + norm2(f.f13) + norm2(f.f14) + norm2(f.f23) + norm2(f.f24) + norm2(f.f34);
  }
  return d;
}

/// Integral with the volume element r dr dphi dx dy.
inline double integrate_volume(ScalarField d) {
  const auto r = radius_field(d.grid);
  for (std::size_t p = 0; p < d.size(); ++p) d.data[p] *= r[p];
  return integrate(d);
}

/// Coordinate density of <F ^ F> against dr dphi dx dy.
inline ScalarField ff_density(const Curvature& F, double sign = 1.0) {
  using namespace axis4;
  const auto &Frp = F(r, phi).data, &Frx = F(r, x).data, &Fry = F(r, y).data;
  const auto &Fpx = F(phi, x).data, &Fpy = F(phi, y).data, &Fxy = F(x, y).data;
  ScalarField d(F.grid);
  for (std::size_t p = 0; p < d.size(); ++p)
    d.data[p] = sign * 2.0 * (dot(Frp[p], Fxy[p]) - dot(Frx[p], Fpy[p]) + dot(Fry[p], Fpx[p]));
  return d;
}

template <class G>
double energy(const Connection<G>& xi, int order = 4) {
  require_4d(xi.grid);
  return 0.5 * integrate_volume(curvature_density(curvature(xi, order)));
}

/// -1/2 integral of <F ^ F>. `sign` exists only as a fault-injection hook.
template <class G>
double charge(const Connection<G>& xi, int order = 4, double sign = 1.0) {
  require_4d(xi.grid);
  return -0.5 * integrate(ff_density(curvature(xi, order), sign));
}

struct ChargeReport {
  double energy = 0.0;
  double charge = 0.0;
  double sd_energy = 0.0;  // 1/2 integral of |F+|^2
  double identity_residual = 0.0;  // |E - (Q + 2 sd_energy)|
};

template <class G>
ChargeReport charge_report(const Connection<G>& xi, int order = 4, double sign = 1.0) {
  require_4d(xi.grid);
  const Curvature F = curvature(xi, order);
  const SelfDualSplit s = self_dual_split(F);
  ScalarField plus(F.grid);
  for (std::size_t p = 0; p < plus.size(); ++p)
    plus.data[p] = norm2(s.plus[0].data[p]) + norm2(s.plus[1].data[p]) + norm2(s.plus[2].data[p]);
  ChargeReport rep;
  rep.energy = 0.5 * integrate_volume(curvature_density(F));
  rep.charge = -0.5 * integrate(ff_density(F, sign));
  rep.sd_energy = 0.5 * integrate_volume(std::move(plus));
  rep.identity_residual = std::abs(rep.energy - (rep.charge + 2.0 * rep.sd_energy));
  return rep;
}

/// rho1 = r^{-1} F_{r phi} + *F_A, rho2 = r^{-1}(d_phi A - d_A Psi) - *(d_r A - d_A a_r),
/// the latter stored as its dx and dy components.
struct AsdResidual {
  AlgebraField rho1, rho2x, rho2y;
  double sd_energy = 0.0;
};

inline AsdResidual asd_residual_from(const Curvature& F) {
  using namespace axis4;
  AsdResidual out{AlgebraField(F.grid), AlgebraField(F.grid), AlgebraField(F.grid), 0.0};
  const auto rr = radius_field(F.grid);
  const auto &Frp = F(r, phi).data, &Frx = F(r, x).data, &Fry = F(r, y).data;
  const auto &Fpx = F(phi, x).data, &Fpy = F(phi, y).data, &Fxy = F(x, y).data;
  ScalarField d(F.grid);
  for (std::size_t p = 0; p < d.size(); ++p) {
    const double ir = 1.0 / rr[p];
    out.rho1.data[p] = Frp[p] * ir + Fxy[p];
    out.rho2x.data[p] = Fpx[p] * ir + Fry[p];
    out.rho2y.data[p] = Fpy[p] * ir - Frx[p];
    d.data[p] = 0.25 * (norm2(out.rho1.data[p]) + norm2(out.rho2x.data[p]) + norm2(out.rho2y.data[p]));
  }
  out.sd_energy = integrate_volume(std::move(d));
  return out;
}

template <class G>
AsdResidual asd_residual(const Connection<G>& xi, int order = 4) {
  require_4d(xi.grid);
  return asd_residual_from(curvature(xi, order));
}

template <class G>
struct SdGradient {
  double sd_energy = 0.0;
  Connection<G> grad;  // derivative of the discrete E_sd with respect to every stored value
};

/// Discrete E_sd and its exact gradient (reverse mode through the stencils).
template <class G>
SdGradient<G> sd_energy_gradient(const Connection<G>& xi, int order = 4) {
  using namespace axis4;
  require_4d(xi.grid);
  const Curvature F = curvature(xi, order);
  const AsdResidual res = asd_residual_from(F);
  const auto rr = radius_field(xi.grid);
  const auto w = point_weights(xi.grid);

  Curvature adj{F.grid, 4, std::vector<AlgebraField>(6, AlgebraField(F.grid))};
  auto &Grp = adj(r, phi).data, &Grx = adj(r, x).data, &Gry = adj(r, y).data;
  auto &Gpx = adj(phi, x).data, &Gpy = adj(phi, y).data, &Gxy = adj(x, y).data;
  for (std::size_t p = 0; p < rr.size(); ++p) {
    const double W = 0.5 * w[p] * rr[p], ir = 1.0 / rr[p];
    const Vec3 l1 = res.rho1.data[p] * W, lx = res.rho2x.data[p] * W, ly = res.rho2y.data[p] * W;
    Grp[p] = l1 * ir;
    Gxy[p] = l1;
    Gpx[p] = lx * ir;
    Gry[p] = lx;
    Gpy[p] = ly * ir;
    Grx[p] = -ly;
  }

  SdGradient<G> out{res.sd_energy, Connection<G>(xi.grid)};
  for (std::size_t mu = 0; mu < 4; ++mu)
    for (std::size_t nu = mu + 1; nu < 4; ++nu) {
      const AlgebraField& g = adj(mu, nu);
      const AlgebraField tn = partial_transpose(g, mu, order);
      const AlgebraField tm = partial_transpose(g, nu, order);
      auto& gn = out.grad.comp[nu].data;
      auto& gm = out.grad.comp[mu].data;
      for (std::size_t p = 0; p < rr.size(); ++p) {
        gn[p] += tn.data[p] - G::bracket(xi.comp[mu].data[p], g.data[p]);
        gm[p] += G::bracket(xi.comp[nu].data[p], g.data[p]) - tm.data[p];
      }
    }
  return out;
}

/// Largest stable-looking default: a fraction of the squared smallest
/// physical spacing (r0 h_phi in the angular direction).
inline double default_relax_step(const GridSpec& g) {
  const double h = std::min({g.axes[0].spacing(), g.axes[0].origin * g.axes[1].spacing(), g.axes[2].spacing(),
                             g.axes[3].spacing()});
  return 0.1 * h * h;
}

template <class G>
struct RelaxResult {
  Connection<G> xi;
  std::vector<double> trace;  // E_sd before the first step and after every step
  bool aborted = false;
  std::string diagnostic;
};

/// Preconditioned gradient descent on E_sd with the r = r0 and r = R slices
/// held fixed. The update divides the raw gradient by the quadrature weight
/// of each point, i.e. it is the L^2 gradient.
template <class G>
RelaxResult<G> relax(const Connection<G>& xi0, int steps, double step_size = 0.0, int order = 4) {
  require_4d(xi0.grid);
  if (step_size == 0.0) step_size = default_relax_step(xi0.grid);
  if (!(step_size > 0.0)) throw usage_error("step size must be positive");
  RelaxResult<G> out{xi0, {}, false, {}};
  const auto rr = radius_field(xi0.grid);
  const auto w = point_weights(xi0.grid);
  const std::size_t slice = xi0.grid.stride(0), nr = xi0.grid.axes[0].size;
  int increases = 0;
  for (int it = 0; it <= steps; ++it) {
    const SdGradient<G> sg = sd_energy_gradient(out.xi, order);
    out.trace.push_back(sg.sd_energy);
    if (it > 0 && out.trace[it] > out.trace[it - 1]) {
      if (++increases >= 3) {
        out.aborted = true;
        out.diagnostic = "self-dual energy increased for 3 consecutive steps; reduce step_size below " +
                         std::to_string(step_size);
        break;
      }
    } else {
      increases = 0;
    }
    if (it == steps) break;
    for (std::size_t c = 0; c < 4; ++c)
      for (std::size_t p = slice; p < (nr - 1) * slice; ++p)
        out.xi.comp[c].data[p] -= sg.grad.comp[c].data[p] * (step_size / (w[p] * rr[p]));
  }
  return out;
}

struct ProfileRow {
  double r = 0.0;
  double fB_norm2 = 0.0;  // ||F_{B(r)}||^2 over S^1 x T^2
  double cs = 0.0;
};

struct RadialProfile {
  std::vector<ProfileRow> rows;
  double weighted_tail = 0.0;        // integral of r^{-1} ||F_{B(r)}||^2 dr
  double energy = 0.0;               // 1/2 integral of |F|^2
  double asd_density_energy = 0.0;   // integral of (|F_A|^2 + r^{-2}|d_phi A - d_A Psi|^2) r dr
  double min_margin_asd = 0.0;       // min of r^2|F_A|^2 + |F_phi.|^2 - |F_B|^2 over r >= 1
  double min_margin_full = 0.0;      // min of 1/2 r^2 |F|^2 - |F_B|^2 over r >= 1
};

template <class G>
RadialProfile radial_profile(const Connection<G>& xi, int order = 4) {
  using namespace axis4;
  require_4d(xi.grid);
  const Curvature F = curvature(xi, order);
  const auto rr = radius_field(xi.grid);
  const std::size_t nr = xi.grid.axes[0].size;

  RadialProfile prof;
  const auto wr = axis_weights(xi.grid.axes[0]);
  for (std::size_t j = 0; j < nr; ++j) {
    const Connection<G> b = split_polar(xi, j);
    ProfileRow row{xi.grid.axes[0].coord(j), l2_norm2<G>(curvature(b, order)), cs(b, order)};
    prof.weighted_tail += wr[j] * row.fB_norm2 / row.r;
    prof.rows.push_back(row);
  }

  ScalarField asd(xi.grid);
  prof.min_margin_asd = prof.min_margin_full = std::numeric_limits<double>::infinity();
  const ScalarField full = curvature_density(F);
  const auto &Fpx = F(phi, x).data, &Fpy = F(phi, y).data, &Fxy = F(x, y).data;
  for (std::size_t p = 0; p < rr.size(); ++p) {
    const double A2 = norm2(Fxy[p]);
    const double P2 = norm2(Fpx[p]) + norm2(Fpy[p]);
    const double r2 = rr[p] * rr[p];
    asd.data[p] = A2 + P2 / r2;
    if (rr[p] >= 1.0) {
      prof.min_margin_asd = std::min(prof.min_margin_asd, r2 * A2 + P2 - (A2 + P2));
      prof.min_margin_full = std::min(prof.min_margin_full, 0.5 * r2 * full.data[p] - (A2 + P2));
    }
  }
  prof.energy = 0.5 * integrate_volume(full);
  prof.asd_density_energy = integrate_volume(std::move(asd));
  return prof;
}

}  // namespace igauge
