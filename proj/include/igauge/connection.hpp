// Connections, curvature and the gauge action on a periodic/radial grid.
#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "igauge/grid.hpp"
#include "igauge/lie.hpp"

namespace igauge {

/// A connection as one algebra-valued component per grid axis.
/// 3d: comp = {Psi (dphi), A_x, A_y}; 4d: comp = {a_r (dr), Psi, A_x, A_y}.
template <class G>
struct Connection {
  GridSpec grid;
  std::vector<AlgebraField> comp;

  Connection() = default;
  explicit Connection(const GridSpec& g) : grid(g), comp(g.dim(), AlgebraField(g)) {}

  std::size_t dim() const { return comp.size(); }
  std::size_t points() const { return grid.points(); }
};

/// Group-valued field; a distinct type per group so the group is deducible.
template <class G>
struct GaugeField : Field<typename G::Element> {
  using Base = Field<typename G::Element>;
  using Base::Base;
  GaugeField() = default;
  explicit GaugeField(Base f) : Base(std::move(f)) {}
};

template <class G>
GaugeField<G> identity_gauge(const GridSpec& g) {
  return GaugeField<G>(g, G::identity());
}

/// Independent components F_{mu nu}, mu < nu, in lexicographic pair order.
/// 3d: (phi x), (phi y), (x y). 4d: (r phi), (r x), (r y), (phi x), (phi y), (x y).
struct Curvature {
  GridSpec grid;
  std::size_t dim = 0;
  std::vector<AlgebraField> comp;

  static std::size_t pair_index(std::size_t dim, std::size_t mu, std::size_t nu) {
    std::size_t k = 0;
    for (std::size_t a = 0; a < dim; ++a)
      for (std::size_t b = a + 1; b < dim; ++b) {
        if (a == mu && b == nu) return k;
        ++k;
      }
    throw usage_error("curvature index out of range");
  }
  const AlgebraField& operator()(std::size_t mu, std::size_t nu) const { return comp[pair_index(dim, mu, nu)]; }
  AlgebraField& operator()(std::size_t mu, std::size_t nu) { return comp[pair_index(dim, mu, nu)]; }
};

/// F_{mu nu} = d_mu A_nu - d_nu A_mu + [A_mu, A_nu] for a single pair.
template <class G>
AlgebraField curvature_component(const Connection<G>& c, std::size_t mu, std::size_t nu, int order = 4) {
  AlgebraField f = partial(c.comp[nu], mu, order);
  const AlgebraField dn = partial(c.comp[mu], nu, order);
  const auto& am = c.comp[mu].data;
  const auto& an = c.comp[nu].data;
  for (std::size_t p = 0; p < f.size(); ++p) f.data[p] += G::bracket(am[p], an[p]) - dn.data[p];
  return f;
}

template <class G>
Curvature curvature(const Connection<G>& c, int order = 4) {
  Curvature F{c.grid, c.dim(), {}};
  for (std::size_t mu = 0; mu < c.dim(); ++mu)
    for (std::size_t nu = mu + 1; nu < c.dim(); ++nu) F.comp.push_back(curvature_component(c, mu, nu, order));
  return F;
}

template <class G>
double l2_norm2(const Curvature& F) {
  ScalarField d(F.grid);
  for (const auto& f : F.comp)
    for (std::size_t p = 0; p < d.size(); ++p) d.data[p] += norm2(f.data[p]);
  return integrate(d);
}

/// u^{-1} d_mu u projected onto the algebra, for every axis, plus the largest
/// discarded residue.
template <class G>
struct MaurerCartanForm {
  std::vector<AlgebraField> omega;
  double max_residue = 0.0;
};

template <class G>
MaurerCartanForm<G> maurer_cartan(const GaugeField<G>& u, int order = 4) {
  MaurerCartanForm<G> out;
  for (std::size_t mu = 0; mu < u.grid.dim(); ++mu) {
    const auto du = partial(static_cast<const Field<typename G::Element>&>(u), mu, order);
    AlgebraField w(u.grid);
    for (std::size_t p = 0; p < u.size(); ++p) {
      const MaurerCartan mc = G::maurer_cartan(u.data[p], du.data[p]);
      w.data[p] = mc.value;
      out.max_residue = std::max(out.max_residue, mc.residue);
    }
    out.omega.push_back(std::move(w));
  }
  return out;
}

template <class G>
struct GaugeApplyResult {
  Connection<G> conn;
  double max_residue = 0.0;
  bool under_resolved = false;  // residue above the warning threshold
};

/// u*B = u^{-1} B u + u^{-1} du, componentwise.
template <class G>
GaugeApplyResult<G> gauge_apply_checked(const GaugeField<G>& u, const Connection<G>& b, int order = 4,
                                        double residue_warn = 1e-3) {
  if (!(u.grid == b.grid)) throw usage_error("gauge field and connection live on different grids");
  const MaurerCartanForm<G> mc = maurer_cartan<G>(u, order);
  GaugeApplyResult<G> out{Connection<G>(b.grid), mc.max_residue, mc.max_residue > residue_warn};
  for (std::size_t mu = 0; mu < b.dim(); ++mu)
    for (std::size_t p = 0; p < b.points(); ++p)
      out.conn.comp[mu].data[p] =
          G::adjoint(G::inverse(u.data[p]), b.comp[mu].data[p]) + mc.omega[mu].data[p];
  return out;
}

template <class G>
Connection<G> gauge_apply(const GaugeField<G>& u, const Connection<G>& b, int order = 4) {
  return gauge_apply_checked(u, b, order).conn;
}

/// Pointwise product (u v)(p) = u(p) v(p).
template <class G>
GaugeField<G> multiply(const GaugeField<G>& u, const GaugeField<G>& v) {
  GaugeField<G> out(u.grid);
  for (std::size_t p = 0; p < u.size(); ++p) out.data[p] = G::mul(u.data[p], v.data[p]);
  return out;
}

}  // namespace igauge
