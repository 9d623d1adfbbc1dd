// Chern-Simons functional on S^1 x T^2, its difference formula, the degree of
// a gauge transformation and the lattice classification of CS values.
//
// Orientation: volume form dphi ^ dx ^ dy. Component order (phi, x, y).
#pragma once

#include <cmath>
#include <cstdint>

#include "igauge/connection.hpp"

namespace igauge {

namespace axis3 {
inline constexpr std::size_t phi = 0, x = 1, y = 2;
}

inline void require_3d(const GridSpec& g) {
  if (g.dim() != 3) throw usage_error("expected a field on the 3d grid (phi, x, y)");
}

/// Pointwise CS density 1/2(<d_phi A_x, A_y> - <d_phi A_y, A_x>) + <F_xy, Psi>.
template <class G>
ScalarField cs_density(const Connection<G>& B, int order = 4) {
  require_3d(B.grid);
  using namespace axis3;
  const AlgebraField dAx = partial(B.comp[x], phi, order);
  const AlgebraField dAy = partial(B.comp[y], phi, order);
  const AlgebraField Fxy = curvature_component(B, x, y, order);
  ScalarField d(B.grid);
  for (std::size_t p = 0; p < d.size(); ++p)
    d.data[p] = 0.5 * (dot(dAx.data[p], B.comp[y].data[p]) - dot(dAy.data[p], B.comp[x].data[p])) +
                dot(Fxy.data[p], B.comp[phi].data[p]);
  return d;
}

template <class G>
double cs(const Connection<G>& B, int order = 4) {
  return integrate(cs_density(B, order));
}

/// CS(B) - CS(B0) through the difference formula
/// 1/2 <(F_B + F_B0) ^ D> - 1/12 <[D ^ D] ^ D>,  D = B - B0.
template <class G>
double cs_diff(const Connection<G>& B, const Connection<G>& B0, int order = 4) {
  require_3d(B.grid);
  if (!(B.grid == B0.grid)) throw usage_error("cs_diff needs connections on one grid");
  using namespace axis3;
  const Curvature F = curvature(B, order);
  const Curvature F0 = curvature(B0, order);
  ScalarField d(B.grid);
  for (std::size_t p = 0; p < d.size(); ++p) {
    const Vec3 Dp = B.comp[phi].data[p] - B0.comp[phi].data[p];
    const Vec3 Dx = B.comp[x].data[p] - B0.comp[x].data[p];
    const Vec3 Dy = B.comp[y].data[p] - B0.comp[y].data[p];
    const Vec3 Gpx = F(phi, x).data[p] + F0(phi, x).data[p];
    const Vec3 Gpy = F(phi, y).data[p] + F0(phi, y).data[p];
    const Vec3 Gxy = F(x, y).data[p] + F0(x, y).data[p];
    d.data[p] = 0.5 * (dot(Gxy, Dp) - dot(Gpy, Dx) + dot(Gpx, Dy)) - 0.5 * dot(G::bracket(Dp, Dx), Dy);
  }
  return integrate(d);
}

struct DegreeResult {
  double raw = 0.0;
  long rounded = 0;
  bool under_resolved = false;
  double max_residue = 0.0;
};

/// kappa^{-1} times the integral of 1/2 <w_phi, [w_x, w_y]>, w = u^{-1} du.
template <class G>
DegreeResult degree(const GaugeField<G>& u, int order = 4, double tolerance = 0.1) {
  require_3d(u.grid);
  using namespace axis3;
  const MaurerCartanForm<G> mc = maurer_cartan<G>(u, order);
  ScalarField d(u.grid);
  for (std::size_t p = 0; p < d.size(); ++p)
    d.data[p] = 0.5 * dot(mc.omega[phi].data[p], G::bracket(mc.omega[x].data[p], mc.omega[y].data[p]));
  DegreeResult r;
  r.raw = integrate(d) / group_constants(G::tag).kappa;
  r.rounded = std::lround(r.raw);
  r.under_resolved = std::abs(r.raw - double(r.rounded)) > tolerance;
  r.max_residue = mc.max_residue;
  return r;
}

/// |cs(B) - cs(u*B) - kappa * deg(u)|
template <class G>
double verify_gauge_law(const Connection<G>& B, const GaugeField<G>& u, int order = 4) {
  const double kappa = group_constants(G::tag).kappa;
  return std::abs(cs(B, order) - cs(gauge_apply(u, B, order), order) - kappa * degree(u, order).raw);
}

struct CSReport {
  double value = 0.0;
  long nearest_lattice = 0;
  double lattice_residual = 0.0;
  double spacing = 0.0;
};

/// Nearest point of kappa Z (or kappa/N_G Z with `cover`).
inline CSReport lattice_report(double value, GroupTag group, bool cover = false) {
  const GroupInfo info = group_constants(group);
  const double spacing = cover ? info.kappa / double(info.N_G) : info.kappa;
  CSReport r;
  r.value = value;
  r.spacing = spacing;
  r.nearest_lattice = std::lround(value / spacing);
  r.lattice_residual = std::abs(value - spacing * double(r.nearest_lattice));
  return r;
}

}  // namespace igauge
