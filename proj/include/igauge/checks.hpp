// Property suites behind the acceptance binary and the `selftest` command.
// Each suite prints one line: criterion_<k>=PASS|FAIL <name> key=value ...
#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "igauge/chern_simons.hpp"
#include "igauge/flat_gauge.hpp"
#include "igauge/generators.hpp"
#include "igauge/instanton.hpp"

namespace igauge {

/// Fault injection for the selftest.
struct Faults {
  bool flip_charge_sign = false;
  bool downgrade_order = false;
};

struct SuiteScale {
  std::vector<std::uint64_t> cs_seeds;
  std::size_t cs_size = 48, cs_fine = 96;
  std::vector<std::uint64_t> cs_fine_seeds;
  std::size_t diff_size = 64;
  std::vector<int> diff_bandlimits{1, 2, 4, 6};
  std::vector<std::uint64_t> diff_seeds;
  std::size_t degree_size = 64;
  std::vector<std::uint64_t> flat_seeds;
  std::size_t flat_size = 48;
  int identity_count = 20;
  std::size_t identity_size = 10, identity_radial = 7;
  std::vector<std::uint64_t> stokes_seeds;
  std::size_t stokes_size = 48, stokes_radial = 25;
  int stokes_bandlimit = 2;
  std::size_t grad_size = 8, grad_radial = 7;
  int grad_directions = 20;
  std::size_t relax_size = 24, relax_radial = 9;
  int relax_steps = 200;
  std::vector<std::uint64_t> annulus_seeds;
  std::vector<int> annulus_degrees{-2, -1, 0, 1, 2};
  std::size_t annulus_size = 48, annulus_radial = 13;
  bool timing = false;  // print wall-clock numbers (breaks byte-for-byte determinism)

  static SuiteScale full() {
    SuiteScale s;
    s.cs_seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    s.cs_fine_seeds = s.cs_seeds;
    s.diff_seeds = {1, 2, 3};
    s.flat_seeds = {1, 2, 3};
    s.stokes_seeds = {1, 2};
    s.annulus_seeds = {1, 2};
    s.timing = true;
    return s;
  }

  static SuiteScale reduced() {
    SuiteScale s;
    s.cs_seeds = {1, 2, 3};
    s.cs_fine_seeds = {1};
    s.diff_size = 48;
    s.diff_seeds = {1};
    s.degree_size = 64;
    s.flat_seeds = {1};
    s.identity_count = 20;
    s.identity_size = 8;
    s.identity_radial = 5;
    s.stokes_seeds = {1};
    s.stokes_size = 32;
    s.stokes_radial = 17;
    s.stokes_bandlimit = 1;
    s.grad_directions = 20;
    s.grad_size = 6;
    s.grad_radial = 5;
    s.relax_size = 12;
    s.relax_radial = 7;
    s.annulus_seeds = {1};
    s.annulus_degrees = {-2, 1};
    return s;
  }
};

namespace detail {

inline std::string num(double v) {
  std::ostringstream o;
  o << std::setprecision(17) << v;
  return o.str();
}

class Line {
 public:
  Line(int id, std::string name) : id_(id), name_(std::move(name)) {}
  Line& kv(const std::string& k, double v) {
    body_ << ' ' << k << '=' << num(v);
    return *this;
  }
  Line& kv(const std::string& k, long v) {
    body_ << ' ' << k << '=' << v;
    return *this;
  }
  Line& kv(const std::string& k, const std::string& v) {
    body_ << ' ' << k << '=' << v;
    return *this;
  }
  void require(bool ok) { pass_ = pass_ && ok; }
  bool pass() const { return pass_; }
  std::string str() const {
    return "criterion_" + std::to_string(id_) + '=' + (pass_ ? "PASS " : "FAIL ") + name_ + body_.str();
  }

 private:
  int id_;
  std::string name_;
  std::ostringstream body_;
  bool pass_ = true;
};

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline double kappa() { return group_constants(GroupTag::SU2).kappa; }

// B = u_d * B0 on the standard flat corpus.
inline Connection<SU2> flat_corpus(std::size_t n, std::uint64_t seed, int d, int order) {
  const GridSpec g = grid3(n);
  return gauge_apply(gen_bump_gauge<SU2>(g, standard_bumps(d)), gen_flat<SU2>(g, seed), order);
}

}  // namespace detail

/// Annulus connection with a_r = 0 interpolating B0 at r0 to B1 at R with the
/// cubic 3t^2 - 2t^3.
template <class G>
Connection<G> annulus_interpolation(const Connection<G>& B0, const Connection<G>& B1, std::size_t radial, double r0,
                                    double R) {
  require_3d(B0.grid);
  if (!(B0.grid == B1.grid)) throw usage_error("boundary slices live on different grids");
  const GridSpec g = grid4(radial, B0.grid.axes[0].size, B0.grid.axes[1].size, B0.grid.axes[2].size, r0, R);
  Connection<G> xi(g);
  const std::size_t n = B0.grid.points();
  for (std::size_t j = 0; j < radial; ++j) {
    const double t = double(j) / double(radial - 1), s = t * t * (3.0 - 2.0 * t);
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t q = 0; q < n; ++q)
        xi.comp[c + 1].data[j * n + q] = B0.comp[c].data[q] * (1.0 - s) + B1.comp[c].data[q] * s;
  }
  return xi;
}

inline bool check_cs_lattice(const SuiteScale& sc, const Faults& f, std::ostream& out) {
  const int order = f.downgrade_order ? 2 : 4;
  const double kappa = detail::kappa();
  detail::Line line(1, "cs_lattice");
  double worst = 0.0, min_shrink = std::numeric_limits<double>::infinity(), max_case = 0.0;
  long cases = 0;
  for (auto seed : sc.cs_seeds)
    for (int d = -2; d <= 2; ++d) {
      const auto t0 = std::chrono::steady_clock::now();
      const double res = std::abs(cs(detail::flat_corpus(sc.cs_size, seed, d, order), order) + kappa * d);
      worst = std::max(worst, res / kappa);
      line.require(res < 0.01 * kappa);
      if (d != 0 && std::find(sc.cs_fine_seeds.begin(), sc.cs_fine_seeds.end(), seed) != sc.cs_fine_seeds.end()) {
        const double fine = std::abs(cs(detail::flat_corpus(sc.cs_fine, seed, d, order), order) + kappa * d);
        const double shrink = res / std::max(fine, 1e-300);
        min_shrink = std::min(min_shrink, shrink);
        line.require(shrink >= 8.0);
      }
      max_case = std::max(max_case, detail::seconds_since(t0));
      ++cases;
    }
  line.kv("cases", cases).kv("size", long(sc.cs_size)).kv("order", long(order));
  line.kv("worst_residual_over_kappa", worst).kv("min_shrink", min_shrink).kv("min_rate", std::log2(min_shrink));
  if (sc.timing) {
    line.kv("max_case_seconds", max_case);
    line.require(max_case <= 60.0);
  }
  out << line.str() << '\n';
  return line.pass();
}

inline bool check_cs_diff(const SuiteScale& sc, const Faults& f, std::ostream& out) {
  const int order = f.downgrade_order ? 2 : 4;
  detail::Line line(2, "cs_diff_consistency");
  double worst = 0.0, min_rate = std::numeric_limits<double>::infinity();
  long cases = 0, at_floor = 0;
  for (int K : sc.diff_bandlimits)
    for (auto seed : sc.diff_seeds) {
      double err[2] = {0, 0}, scale[2] = {1, 1};
      const std::size_t sizes[2] = {sc.diff_size / 2, sc.diff_size};
      for (int k = 0; k < 2; ++k) {
        const GridSpec g = grid3(sizes[k]);
        const auto B = gen_random_conn<SU2>(g, seed, K, 0.5);
        const auto B0 = gen_random_conn<SU2>(g, seed + 1000, K, 0.5);
        const double a = cs(B, order), b = cs(B0, order);
        err[k] = std::abs(cs_diff(B, B0, order) - (a - b));
        scale[k] = 1.0 + std::abs(a) + std::abs(b);
      }
      worst = std::max(worst, err[1] / scale[1]);
      line.require(err[1] < 1e-5 * scale[1]);
      const bool floor = err[0] < 1e-12 * scale[0] && err[1] < 1e-12 * scale[1];
      if (floor) {
        ++at_floor;
      } else {
        const double rate = std::log2(err[0] / err[1]);
        min_rate = std::min(min_rate, rate);
        line.require(rate >= 3.0);
      }
      ++cases;
    }
  line.kv("cases", cases).kv("size", long(sc.diff_size)).kv("worst_relative_error", worst);
  line.kv("cases_at_roundoff_floor", at_floor).kv("min_rate", cases == at_floor ? std::string("n/a") : detail::num(min_rate));
  out << line.str() << '\n';
  return line.pass();
}

inline bool check_degree(const SuiteScale& sc, const Faults& f, std::ostream& out) {
  const int order = f.downgrade_order ? 2 : 4;
  detail::Line line(3, "degree_integrality");
  const GridSpec g = grid3(sc.degree_size);
  double single = 0.0, translation = 0.0;
  long mismatches = 0;
  Rng rng(2024);
  for (int d = -2; d <= 2; ++d) {
    const auto u = gen_bump_gauge<SU2>(g, standard_bumps(d));
    const DegreeResult r = degree<SU2>(u, order);
    if (std::abs(d) == 1) single = std::max(single, std::abs(r.raw - d));
    if (r.rounded != d || r.under_resolved) ++mismatches;
    const auto left = GaugeField<SU2>(g, SU2::exp(rng.unit_vector() * rng.uniform(0.5, 3.0)));
    const auto right = GaugeField<SU2>(g, SU2::exp(rng.unit_vector() * rng.uniform(0.5, 3.0)));
    translation = std::max(translation, std::abs(degree<SU2>(multiply(left, u), order).raw - r.raw));
    translation = std::max(translation, std::abs(degree<SU2>(multiply(u, right), order).raw - r.raw));
  }
  line.require(single < 1e-3 && mismatches == 0 && translation < 1e-6);
  line.kv("size", long(sc.degree_size)).kv("single_bump_error", single).kv("rounding_mismatches", mismatches);
  line.kv("translation_change", translation);
  out << line.str() << '\n';
  return line.pass();
}

inline bool check_flat_pipeline(const SuiteScale& sc, const Faults& f, std::ostream& out) {
  const int order = f.downgrade_order ? 2 : 4;
  const double kappa = detail::kappa();
  detail::Line line(4, "flat_normalization");
  double worst_cs = 0.0, worst_tp = 0.0, worst_closure = 0.0, worst_start = 0.0;
  long cases = 0, inconsistent = 0, unsupported = 0;
  for (auto seed : sc.flat_seeds)
    for (int d = -2; d <= 2; ++d) {
      ++cases;
      try {
        const auto r = normalize_flat(detail::flat_corpus(sc.flat_size, seed, d, order), order);
        worst_cs = std::max(worst_cs, r.cs_residual / kappa);
        worst_tp = std::max(worst_tp, r.twisted_periodicity);
        worst_closure = std::max(worst_closure, r.closure_residual);
        const std::size_t nq = r.w.size() / r.w.grid.axes[0].size;
        for (std::size_t q = 0; q < nq; ++q) worst_start = std::max(worst_start, SU2::distance(r.w.data[q], SU2::identity()));
        if (!r.consistent || r.deg_w.rounded != -d) ++inconsistent;
      } catch (const unsupported_input&) {
        ++unsupported;
      }
    }
  line.require(worst_cs < 1e-3 && worst_tp < 1e-8 && worst_start == 0.0 && worst_closure <= 1e-2 &&
               inconsistent == 0 && unsupported == 0);
  line.kv("cases", cases).kv("size", long(sc.flat_size)).kv("worst_cs_residual_over_kappa", worst_cs);
  line.kv("worst_twisted_periodicity", worst_tp).kv("w_at_phi0_deviation", worst_start);
  line.kv("worst_closure_residual", worst_closure).kv("lattice_mismatches", inconsistent).kv("unsupported", unsupported);
  out << line.str() << '\n';
  return line.pass();
}

inline bool check_identities(const SuiteScale& sc, const Faults& f, std::ostream& out) {
  const int order = f.downgrade_order ? 2 : 4;
  const double sign = f.flip_charge_sign ? -1.0 : 1.0;
  detail::Line line(5, "same_grid_identities");
  double split = 0.0, wedge = 0.0, rho = 0.0, eq = 0.0;
  for (int k = 0; k < sc.identity_count; ++k) {
    const GridSpec g = grid4(sc.identity_radial, sc.identity_size, sc.identity_size, sc.identity_size, 1.0, 2.0);
    const auto xi = gen_random_conn<SU2>(g, 500 + std::uint64_t(k), 1 + k % 2, 0.4 + 0.05 * (k % 5));
    const Curvature F = curvature(xi, order);
    const SelfDualSplit s = self_dual_split(F);
    const ScalarField full = curvature_density(F);
    const ScalarField ff = ff_density(F, sign);
    const AsdResidual res = asd_residual_from(F);
    const auto rr = radius_field(g);
    for (std::size_t p = 0; p < full.size(); ++p) {
      const double plus = norm2(s.plus[0].data[p]) + norm2(s.plus[1].data[p]) + norm2(s.plus[2].data[p]);
      const double minus = norm2(s.minus[0].data[p]) + norm2(s.minus[1].data[p]) + norm2(s.minus[2].data[p]);
      const double scale = std::max(full.data[p], 1e-300);
      split = std::max(split, std::abs(full.data[p] - plus - minus) / scale);
      wedge = std::max(wedge, std::abs(ff.data[p] / rr[p] - (plus - minus)) / scale);
      const double r2 = norm2(res.rho1.data[p]) + norm2(res.rho2x.data[p]) + norm2(res.rho2y.data[p]);
      rho = std::max(rho, std::abs(r2 - 2.0 * plus) / scale);
    }
    const ChargeReport rep = charge_report(xi, order, sign);
    eq = std::max(eq, rep.identity_residual / std::max({rep.energy, std::abs(rep.charge), 1e-300}));
    eq = std::max(eq, std::abs(res.sd_energy - rep.sd_energy) / std::max(rep.energy, 1e-300));
  }
  line.require(split < 1e-10 && wedge < 1e-10 && rho < 1e-10 && eq < 1e-10);
  line.kv("fields", long(sc.identity_count)).kv("pointwise_split", split).kv("pointwise_wedge", wedge);
  line.kv("pointwise_asd_residual", rho).kv("energy_minus_charge", eq);
  out << line.str() << '\n';
  return line.pass();
}

inline bool check_stokes(const SuiteScale& sc, const Faults& f, std::ostream& out) {
  const int order = f.downgrade_order ? 2 : 4;
  const double sign = f.flip_charge_sign ? -1.0 : 1.0;
  detail::Line line(6, "annulus_stokes");
  double worst = 0.0, min_rate = std::numeric_limits<double>::infinity();
  for (auto seed : sc.stokes_seeds) {
    double err[2];
    const std::size_t n[2] = {sc.stokes_size / 2, sc.stokes_size};
    const std::size_t nr[2] = {sc.stokes_radial / 2 + 1, sc.stokes_radial};
    double q = 0.0;
    for (int k = 0; k < 2; ++k) {
      const GridSpec g = grid4(nr[k], n[k], n[k], n[k], 1.0, 2.0);
      const auto xi = gen_random_conn<SU2>(g, seed, sc.stokes_bandlimit, 0.3);
      q = charge(xi, order, sign);
      err[k] = std::abs(q - (cs(split_polar(xi, 0), order) - cs(split_polar(xi, nr[k] - 1), order)));
    }
    worst = std::max(worst, err[1] / (1.0 + std::abs(q)));
    line.require(err[1] < 1e-4 * (1.0 + std::abs(q)));
    const double rate = std::log2(err[0] / err[1]);
    min_rate = std::min(min_rate, rate);
    line.require(rate >= 3.0);
  }
  line.kv("size", long(sc.stokes_size)).kv("radial", long(sc.stokes_radial));
  line.kv("worst_relative_error", worst).kv("min_rate", min_rate);
  out << line.str() << '\n';
  return line.pass();
}

template <class G>
struct AnnulusCase {
  Connection<G> xi;
  int degree = 0;
};

/// Annuli whose boundary slices are B0 and u_d * B0 from the flat corpus.
inline std::vector<AnnulusCase<SU2>> annulus_corpus(const SuiteScale& sc, int order) {
  std::vector<AnnulusCase<SU2>> out;
  for (auto seed : sc.annulus_seeds)
    for (int d : sc.annulus_degrees) {
      const GridSpec g = grid3(sc.annulus_size);
      const auto B0 = gen_flat<SU2>(g, seed);
      const auto B1 = gauge_apply(gen_bump_gauge<SU2>(g, standard_bumps(d)), B0, order);
      out.push_back({annulus_interpolation(B0, B1, sc.annulus_radial, 1.0, 2.0), d});
    }
  return out;
}

inline bool check_profile_estimates(const SuiteScale& sc, const Faults& f, std::ostream& out) {
  const int order = f.downgrade_order ? 2 : 4;
  detail::Line line(7, "radial_estimates");
  double tail_margin = std::numeric_limits<double>::infinity(), point_margin = tail_margin;
  double tail_margin_full = tail_margin, point_margin_full = tail_margin;
  long fields = 0;
  auto visit = [&](const Connection<SU2>& xi) {
    const RadialProfile p = radial_profile(xi, order);
    tail_margin = std::min(tail_margin, p.asd_density_energy - p.weighted_tail);
    point_margin = std::min(point_margin, p.min_margin_asd);
    tail_margin_full = std::min(tail_margin_full, p.energy - p.weighted_tail);
    point_margin_full = std::min(point_margin_full, p.min_margin_full);
    ++fields;
  };
  for (auto seed : sc.stokes_seeds)
    visit(gen_random_conn<SU2>(grid4(sc.stokes_radial / 2 + 1, sc.stokes_size / 2, sc.stokes_size / 2,
                                     sc.stokes_size / 2, 1.0, 2.0),
                               seed, sc.stokes_bandlimit, 0.3));
  for (const auto& c : annulus_corpus(sc, order)) visit(c.xi);
  line.require(tail_margin >= -1e-9 && point_margin >= -1e-10);
  line.kv("fields", fields).kv("tail_margin", tail_margin).kv("pointwise_margin", point_margin);
  line.kv("tail_margin_full_density", tail_margin_full).kv("pointwise_margin_full_density", point_margin_full);
  out << line.str() << '\n';
  return line.pass();
}

inline bool check_relaxation(const SuiteScale& sc, const Faults& f, std::ostream& out) {
  const int order = f.downgrade_order ? 2 : 4;
  detail::Line line(8, "relaxation");
  const GridSpec gg = grid4(sc.grad_radial, sc.grad_size, sc.grad_size, sc.grad_size, 1.0, 2.0);
  const auto x0 = gen_random_conn<SU2>(gg, 77, 1, 0.6);
  const auto sg = sd_energy_gradient(x0, order);
  Rng rng(78);
  double grad_err = 0.0;
  for (int k = 0; k < sc.grad_directions; ++k) {
    Connection<SU2> v(gg);
    for (auto& c : v.comp)
      for (auto& e : c.data) e = Vec3{{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}};
    double analytic = 0.0;
    for (std::size_t c = 0; c < 4; ++c)
      for (std::size_t p = 0; p < gg.points(); ++p) analytic += dot(sg.grad.comp[c].data[p], v.comp[c].data[p]);
    const double eps = 1e-5;
    auto plus = x0, minus = x0;
    for (std::size_t c = 0; c < 4; ++c)
      for (std::size_t p = 0; p < gg.points(); ++p) {
        plus.comp[c].data[p] += v.comp[c].data[p] * eps;
        minus.comp[c].data[p] -= v.comp[c].data[p] * eps;
      }
    const double fd = (asd_residual(plus, order).sd_energy - asd_residual(minus, order).sd_energy) / (2 * eps);
    grad_err = std::max(grad_err, std::abs(analytic - fd) / std::max(std::abs(fd), 1e-300));
  }

  const GridSpec g = grid4(sc.relax_radial, sc.relax_size, sc.relax_size, sc.relax_size, 1.0, 2.0);
  const auto xi0 = gen_random_conn<SU2>(g, 79, 2, 0.3);
  const auto rel = relax(xi0, sc.relax_steps, 0.0, order);
  long increases = 0;
  for (std::size_t i = 1; i < rel.trace.size(); ++i)
    if (rel.trace[i] > rel.trace[i - 1]) ++increases;
  bool boundary_same = true;
  const std::size_t slice = g.stride(0), last = (sc.relax_radial - 1) * slice;
  for (std::size_t c = 0; c < 4; ++c) {
    const auto* a = xi0.comp[c].data.data();
    const auto* b = rel.xi.comp[c].data.data();
    boundary_same = boundary_same && std::memcmp(a, b, slice * sizeof(Vec3)) == 0 &&
                    std::memcmp(a + last, b + last, slice * sizeof(Vec3)) == 0;
  }
  line.require(grad_err < 1e-6 && increases == 0 && !rel.aborted && boundary_same);
  line.kv("directions", long(sc.grad_directions)).kv("gradient_relative_error", grad_err);
  line.kv("steps", long(rel.trace.size() - 1)).kv("increases", increases);
  line.kv("sd_energy_initial", rel.trace.front()).kv("sd_energy_final", rel.trace.back());
  line.kv("boundary_bit_identical", std::string(boundary_same ? "1" : "0"));
  out << line.str() << '\n';
  return line.pass();
}

inline bool check_energy_bound(const SuiteScale& sc, const Faults& f, std::ostream& out) {
  const int order = f.downgrade_order ? 2 : 4;
  const double sign = f.flip_charge_sign ? -1.0 : 1.0;
  const double kappa = detail::kappa();
  detail::Line line(9, "quantized_energy_bound");
  double worst_lattice = 0.0, min_margin = std::numeric_limits<double>::infinity();
  long cases = 0, wrong_point = 0;
  for (const auto& c : annulus_corpus(sc, order)) {
    const ChargeReport rep = charge_report(c.xi, order, sign);
    const CSReport lat = lattice_report(std::abs(rep.charge), GroupTag::SU2);
    const double point = kappa * double(lat.nearest_lattice);
    worst_lattice = std::max(worst_lattice, lat.lattice_residual / kappa);
    min_margin = std::min(min_margin, (rep.energy - (point - 0.01 * kappa)) / kappa);
    if (lat.nearest_lattice != std::abs(c.degree)) ++wrong_point;
    line.require(lat.lattice_residual < 0.01 * kappa && rep.energy >= point - 0.01 * kappa);
    ++cases;
  }
  line.require(wrong_point == 0);
  line.kv("cases", cases).kv("size", long(sc.annulus_size)).kv("radial", long(sc.annulus_radial));
  line.kv("worst_charge_lattice_residual_over_kappa", worst_lattice).kv("min_energy_margin_over_kappa", min_margin);
  line.kv("lattice_point_mismatches", wrong_point);
  out << line.str() << '\n';
  return line.pass();
}

/// Runs criteria 1..9 (or the subset in `only`); returns the number of failures.
inline int run_checks(const SuiteScale& sc, const Faults& f, std::ostream& out, const std::set<int>& only = {}) {
  using Check = bool (*)(const SuiteScale&, const Faults&, std::ostream&);
  static constexpr Check checks[] = {check_cs_lattice,       check_cs_diff,       check_degree,
                                     check_flat_pipeline,    check_identities,    check_stokes,
                                     check_profile_estimates, check_relaxation,   check_energy_bound};
  int failures = 0;
  for (int k = 0; k < 9; ++k) {
    if (!only.empty() && !only.count(k + 1)) continue;
    if (!checks[k](sc, f, out)) ++failures;
    out.flush();
  }
  return failures;
}

}  // namespace igauge
