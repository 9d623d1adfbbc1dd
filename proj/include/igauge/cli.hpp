// The igauge command line. run_command never calls exit(); it returns the
// process exit code: 0 ok, 2 usage, 3 format, 4 numerical diagnostic.
#pragma once

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <locale>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "igauge/checks.hpp"
#include "igauge/chern_simons.hpp"
#include "igauge/config.hpp"
#include "igauge/flat_gauge.hpp"
#include "igauge/generators.hpp"
#include "igauge/instanton.hpp"
#include "igauge/io.hpp"

namespace igauge {

namespace exit_code {
inline constexpr int ok = 0, usage = 2, format = 3, numerical = 4;
}

/// Numerical diagnostic raised after the report has been printed.
struct numerical_diagnostic : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace cli {

class Report {
 public:
  explicit Report(std::ostream& out) : out_(out) {}
  Report& operator()(const std::string& key, double v) {
    out_ << key << '=' << detail::num(v) << '\n';
    return *this;
  }
  Report& operator()(const std::string& key, long v) {
    out_ << key << '=' << v << '\n';
    return *this;
  }
  Report& operator()(const std::string& key, int v) { return (*this)(key, long(v)); }
  Report& operator()(const std::string& key, bool v) { return (*this)(key, long(v ? 1 : 0)); }
  Report& operator()(const std::string& key, const std::string& v) {
    out_ << key << '=' << v << '\n';
    return *this;
  }
  Report& operator()(const std::string& key, const char* v) { return (*this)(key, std::string(v)); }
  Report& operator()(const std::string& key, const Vec3& v) {
    out_ << key << '=' << detail::num(v[0]) << ',' << detail::num(v[1]) << ',' << detail::num(v[2]) << '\n';
    return *this;
  }

 private:
  std::ostream& out_;
};

class Csv {
 public:
  Csv(const std::string& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw usage_error("cannot open " + path + " for writing");
    out_.imbue(std::locale::classic());
    out_ << std::setprecision(17);
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }
  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << values[i];
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

template <class F>
decltype(auto) with_group(GroupTag tag, F&& f) {
  if (tag == GroupTag::SO3) return f(SO3{});
  return f(SU2{});
}

/// Everything a subcommand needs after parsing.
struct Context {
  RunConfig cfg;
  bool group_explicit = false;
  std::string in, ref, gauge, out, csv;
  int dim = 3;
  bool random = false;
  bool inject_sign_flip = false, inject_order_downgrade = false;
  std::vector<int> only;
  std::ostream* os = nullptr;
};

inline FieldFile load(Context& ctx, const std::string& path, const char* what) {
  if (path.empty()) throw usage_error(std::string("missing --") + what);
  FieldFile f = read_field(path);
  if (ctx.group_explicit && f.group != ctx.cfg.group)
    throw usage_error(path + " holds a " + to_string(f.group) + " field but --group is " + to_string(ctx.cfg.group));
  ctx.cfg.group = f.group;
  const GridSpec& g = f.grid;
  const std::size_t off = g.dim() == 4 ? 1 : 0;
  if (g.dim() == 3 || g.dim() == 4) {
    ctx.cfg.size_phi = g.axes[off].size;
    ctx.cfg.size_x = g.axes[off + 1].size;
    ctx.cfg.size_y = g.axes[off + 2].size;
  }
  if (g.dim() == 4) {
    ctx.cfg.radial = g.axes[0].size;
    ctx.cfg.r0 = g.axes[0].origin;
    ctx.cfg.R = g.axes[0].origin + g.axes[0].extent;
  }
  return f;
}

inline void require_out(const Context& ctx) {
  if (ctx.out.empty()) throw usage_error("missing --out");
}

// --- generators -------------------------------------------------------------

template <class G>
void gen_flat_cmd(Context& ctx, Report& rep) {
  require_out(ctx);
  const RunConfig& c = ctx.cfg;
  const GridSpec g = c.grid3d();
  Connection<G> B = gen_flat<G>(g, c.seed);
  const double cs0 = cs(B, c.order);
  if (c.degree != 0) B = gauge_apply(gen_bump_gauge<G>(g, standard_bumps(c.degree)), B, c.order);
  write_field(ctx.out, to_file(B));
  const CSReport lat = lattice_report(cs(B, c.order), G::tag);
  rep("output", ctx.out)("kind", "connection")("gauge_degree", c.degree)("cs_base", cs0);
  rep("cs", lat.value)("lattice_k", lat.nearest_lattice)("lattice_residual", lat.lattice_residual);
}

template <class G>
void gen_gauge_cmd(Context& ctx, Report& rep) {
  require_out(ctx);
  const RunConfig& c = ctx.cfg;
  const GridSpec g = c.grid3d();
  const GaugeField<G> u = ctx.random ? gen_random_gauge<G>(g, c.seed, c.bandlimit, c.amplitude)
                                     : gen_bump_gauge<G>(g, standard_bumps(c.degree));
  write_field(ctx.out, to_file(u));
  const DegreeResult d = degree<G>(u, c.order, c.degree_tol);
  rep("output", ctx.out)("kind", "gauge")("generator", ctx.random ? "random" : "bumps");
  rep("degree_raw", d.raw)("degree", d.rounded)("under_resolved", d.under_resolved);
}

template <class G>
void gen_random_cmd(Context& ctx, Report& rep) {
  require_out(ctx);
  const RunConfig& c = ctx.cfg;
  if (ctx.dim != 3 && ctx.dim != 4) throw usage_error("--dim must be 3 or 4");
  const GridSpec g = ctx.dim == 4 ? c.grid4d() : c.grid3d();
  const Connection<G> B = gen_random_conn<G>(g, c.seed, c.bandlimit, c.amplitude);
  write_field(ctx.out, to_file(B));
  rep("output", ctx.out)("kind", "connection")("dim", ctx.dim);
  if (ctx.dim == 3) rep("cs", cs(B, c.order));
  else rep("energy", energy(B, c.order))("charge", charge(B, c.order));
}

template <class G>
void apply_cmd(Context& ctx, Report& rep) {
  require_out(ctx);
  const Connection<G> B = as_connection<G>(load(ctx, ctx.in, "in"), 3);
  const GaugeField<G> u = as_gauge<G>(load(ctx, ctx.gauge, "gauge"));
  if (!(u.grid == B.grid)) throw usage_error("gauge field and connection live on different grids");
  const auto r = gauge_apply_checked(u, B, ctx.cfg.order, ctx.cfg.residue_warn);
  write_field(ctx.out, to_file(r.conn));
  rep("output", ctx.out)("cs_in", cs(B, ctx.cfg.order))("cs_out", cs(r.conn, ctx.cfg.order));
  rep("gauge_residue", r.max_residue)("gauge_residue_warning", r.under_resolved);
}

// --- three-dimensional analysis -------------------------------------------

template <class G>
void cs_cmd(Context& ctx, Report& rep) {
  const Connection<G> B = as_connection<G>(load(ctx, ctx.in, "in"), 3);
  const CSReport lat = lattice_report(cs(B, ctx.cfg.order), G::tag);
  const CSReport cover = lattice_report(lat.value, G::tag, true);
  rep("cs", lat.value)("lattice_spacing", lat.spacing)("lattice_k", lat.nearest_lattice);
  rep("lattice_residual", lat.lattice_residual)("cover_spacing", cover.spacing)("cover_k", cover.nearest_lattice);
  rep("cover_residual", cover.lattice_residual);
}

template <class G>
void cs_diff_cmd(Context& ctx, Report& rep) {
  const Connection<G> B = as_connection<G>(load(ctx, ctx.in, "in"), 3);
  const Connection<G> B0 = as_connection<G>(load(ctx, ctx.ref, "ref"), 3);
  if (!(B.grid == B0.grid)) throw usage_error("--in and --ref live on different grids");
  const int o = ctx.cfg.order;
  const double d = cs_diff(B, B0, o), a = cs(B, o), b = cs(B0, o);
  rep("cs_diff", d)("cs_in", a)("cs_ref", b)("direct_difference", a - b)("mismatch", std::abs(d - (a - b)));
}

template <class G>
void degree_cmd(Context& ctx, Report& rep) {
  const GaugeField<G> u = as_gauge<G>(load(ctx, ctx.in, "in"));
  require_3d(u.grid);
  const DegreeResult d = degree<G>(u, ctx.cfg.order, ctx.cfg.degree_tol);
  rep("degree_raw", d.raw)("degree", d.rounded)("distance_to_integer", std::abs(d.raw - double(d.rounded)));
  rep("maurer_cartan_residue", d.max_residue)("under_resolved", d.under_resolved);
  if (d.under_resolved) throw numerical_diagnostic("degree is not within degree_tol of an integer; refine the grid");
}

template <class G>
void gauge_law_cmd(Context& ctx, Report& rep) {
  const Connection<G> B = as_connection<G>(load(ctx, ctx.in, "in"), 3);
  const GaugeField<G> u = as_gauge<G>(load(ctx, ctx.gauge, "gauge"));
  if (!(u.grid == B.grid)) throw usage_error("gauge field and connection live on different grids");
  const int o = ctx.cfg.order;
  const double kappa = group_constants(G::tag).kappa;
  const auto applied = gauge_apply_checked(u, B, o, ctx.cfg.residue_warn);
  const DegreeResult d = degree<G>(u, o, ctx.cfg.degree_tol);
  const double a = cs(B, o), b = cs(applied.conn, o);
  rep("cs_in", a)("cs_gauged", b)("degree_raw", d.raw)("degree", d.rounded)("kappa", kappa);
  rep("law_residual", std::abs(a - b - kappa * d.raw))("law_residual_over_kappa", std::abs(a - b - kappa * d.raw) / kappa);
  rep("gauge_residue", applied.max_residue)("gauge_residue_warning", applied.under_resolved);
  rep("under_resolved", d.under_resolved);
  if (d.under_resolved) throw numerical_diagnostic("degree is not within degree_tol of an integer; refine the grid");
}

template <class G>
void flat_gauge_cmd(Context& ctx, Report& rep) {
  const Connection<G> B = as_connection<G>(load(ctx, ctx.in, "in"), 3);
  const RunConfig& c = ctx.cfg;
  const auto n = normalize_flat(B, c.order, FlatTolerances{c.rk4_tol, c.constancy_tol, c.degree_tol});
  const double kappa = group_constants(G::tag).kappa;
  rep("cs", n.cs_B)("lattice_k", n.lattice.nearest_lattice)("lattice_residual", n.lattice.lattice_residual);
  rep("cs_normalized", n.cs_wB)("cs_residual", n.cs_residual)("cs_residual_over_kappa", n.cs_residual / kappa);
  rep("deg_w_raw", n.deg_w.raw)("deg_w", n.deg_w.rounded)("consistent", n.consistent);
  rep("xi", n.xi)("twist_term", n.twist_term)("isotropy_residual", n.isotropy_residual);
  rep("twisted_periodicity", n.twisted_periodicity)("closure_residual", n.closure_residual);
  rep("holonomy_spread", n.holonomy_spread)("gauge_residue", n.gauge_residue)("under_resolved", n.under_resolved);
  if (!ctx.out.empty()) {
    write_field(ctx.out, to_file(n.w));
    rep("output", ctx.out);
  }
  if (n.under_resolved) throw numerical_diagnostic("flat normalization is under-resolved; refine the grid");
}

// --- four-dimensional analysis --------------------------------------------

template <class G>
void charge_cmd(Context& ctx, Report& rep) {
  const Connection<G> xi = as_connection<G>(load(ctx, ctx.in, "in"), 4);
  const int o = ctx.cfg.order;
  const ChargeReport r = charge_report(xi, o);
  const double c0 = cs(split_polar(xi, 0), o), c1 = cs(split_polar(xi, xi.grid.axes[0].size - 1), o);
  const CSReport lat = lattice_report(std::abs(r.charge), G::tag);
  rep("energy", r.energy)("charge", r.charge)("sd_energy", r.sd_energy)("identity_residual", r.identity_residual);
  rep("cs_inner", c0)("cs_outer", c1)("stokes_residual", std::abs(r.charge - (c0 - c1)));
  rep("charge_lattice_k", lat.nearest_lattice)("charge_lattice_residual", lat.lattice_residual);
}

template <class G>
void asd_cmd(Context& ctx, Report& rep) {
  const Connection<G> xi = as_connection<G>(load(ctx, ctx.in, "in"), 4);
  const AsdResidual r = asd_residual(xi, ctx.cfg.order);
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t p = 0; p < r.rho1.size(); ++p) {
    m1 = std::max(m1, norm(r.rho1.data[p]));
    m2 = std::max(m2, std::sqrt(norm2(r.rho2x.data[p]) + norm2(r.rho2y.data[p])));
  }
  rep("sd_energy", r.sd_energy)("rho1_max", m1)("rho2_max", m2);
  if (!ctx.csv.empty()) {
    const auto rr = radius_field(xi.grid);
    const std::size_t nr = xi.grid.axes[0].size, slice = xi.grid.stride(0);
    Csv csv(ctx.csv, {"r", "rho1_max", "rho2_max"});
    for (std::size_t j = 0; j < nr; ++j) {
      double a = 0.0, b = 0.0;
      for (std::size_t p = j * slice; p < (j + 1) * slice; ++p) {
        a = std::max(a, norm(r.rho1.data[p]));
        b = std::max(b, std::sqrt(norm2(r.rho2x.data[p]) + norm2(r.rho2y.data[p])));
      }
      csv.row({rr[j * slice], a, b});
    }
    rep("csv", ctx.csv);
  }
}

template <class G>
void relax_cmd(Context& ctx, Report& rep) {
  require_out(ctx);
  const Connection<G> xi = as_connection<G>(load(ctx, ctx.in, "in"), 4);
  const RunConfig& c = ctx.cfg;
  const double step = c.step_size > 0.0 ? c.step_size : default_relax_step(xi.grid);
  const RelaxResult<G> r = relax(xi, c.steps, step, c.order);
  write_field(ctx.out, to_file(r.xi));
  if (!ctx.csv.empty()) {
    Csv csv(ctx.csv, {"step", "sd_energy"});
    for (std::size_t i = 0; i < r.trace.size(); ++i) csv.row({double(i), r.trace[i]});
    rep("csv", ctx.csv);
  }
  rep("output", ctx.out)("step_size_used", step)("steps_taken", long(r.trace.size()) - 1);
  rep("sd_energy_initial", r.trace.front())("sd_energy_final", r.trace.back())("aborted", r.aborted);
  if (r.aborted) throw numerical_diagnostic(r.diagnostic);
}

template <class G>
void profile_cmd(Context& ctx, Report& rep) {
  const Connection<G> xi = as_connection<G>(load(ctx, ctx.in, "in"), 4);
  const RadialProfile p = radial_profile(xi, ctx.cfg.order);
  if (!ctx.csv.empty()) {
    Csv csv(ctx.csv, {"r", "fB_norm2", "cs"});
    for (const auto& row : p.rows) csv.row({row.r, row.fB_norm2, row.cs});
    rep("csv", ctx.csv);
  } else {
    for (std::size_t j = 0; j < p.rows.size(); ++j) {
      const std::string k = "row" + std::to_string(j);
      rep(k + ".r", p.rows[j].r)(k + ".fB_norm2", p.rows[j].fB_norm2)(k + ".cs", p.rows[j].cs);
    }
  }
  rep("weighted_tail", p.weighted_tail)("energy", p.energy)("asd_density_energy", p.asd_density_energy);
  rep("min_margin_asd", p.min_margin_asd)("min_margin_full", p.min_margin_full);
}

inline int selftest_cmd(Context& ctx, Report& rep) {
  Faults f;
  f.flip_charge_sign = ctx.inject_sign_flip;
  f.downgrade_order = ctx.inject_order_downgrade;
  rep("selftest.scale", "reduced")("selftest.inject_sign_flip", f.flip_charge_sign);
  rep("selftest.inject_order_downgrade", f.downgrade_order);
  const std::set<int> only(ctx.only.begin(), ctx.only.end());
  for (int k : only)
    if (k < 1 || k > 9) throw usage_error("--only takes criterion numbers 1..9");
  const int failures = run_checks(SuiteScale::reduced(), f, *ctx.os, only);
  rep("selftest.failures", failures);
  return failures == 0 ? exit_code::ok : exit_code::numerical;
}

struct Command {
  std::string name, help;
};

}  // namespace cli

/// Runs one command line (args excludes the program name).
inline int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using namespace cli;
  CLI::App app{"Gauge fields on S^1 x T^2 and [r0,R] x S^1 x T^2", "igauge"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  Context ctx;
  ctx.os = &out;
  std::string config_path;
  std::map<std::string, std::string> values;
  std::vector<std::tuple<std::string, CLI::App*, CLI::Option*>> options;

  const std::vector<Command> commands{
      {"gen-flat", "constant commuting connection (optionally gauged by the degree-d bump gauge)"},
      {"gen-gauge", "bump gauge transformation of prescribed degree, or a random smooth one"},
      {"gen-random", "bandlimited random connection on the 3d or 4d grid"},
      {"apply", "gauge transform a connection: u*B"},
      {"cs", "Chern-Simons value and its lattice point"},
      {"cs-diff", "CS(B) - CS(B0) through the difference formula"},
      {"degree", "degree of a gauge transformation"},
      {"gauge-law", "check cs(B) - cs(u*B) = kappa deg(u)"},
      {"flat-gauge", "normalize a flat connection and report the lattice consistency"},
      {"charge", "energy, charge and self-dual energy of a 4d connection"},
      {"asd", "anti-self-duality residual"},
      {"relax", "gradient descent on the self-dual energy with fixed boundary slices"},
      {"profile", "radial profile of slice curvature norms and CS values"},
      {"selftest", "run the property suites at reduced sizes"},
  };
  const std::map<std::string, std::string> flag_for{{"size_phi", "--size-phi"}, {"size_x", "--size-x"},
                                                    {"size_y", "--size-y"},     {"step_size", "--step-size"},
                                                    {"degree_tol", "--degree-tol"}, {"rk4_tol", "--rk4-tol"},
                                                    {"constancy_tol", "--constancy-tol"},
                                                    {"residue_warn", "--residue-warn"}};
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_path, "key=value configuration file (flags win)");
    for (const auto& key : RunConfig::keys()) {
      const auto it = flag_for.find(key);
      const std::string flag = it != flag_for.end() ? it->second : "--" + key;
      options.emplace_back(key, sub, sub->add_option(flag, values[key], "override " + key));
    }
    const std::string& n = c.name;
    if (n != "selftest" && n != "gen-flat" && n != "gen-gauge" && n != "gen-random")
      sub->add_option("--in", ctx.in, "input field file");
    if (n == "cs-diff") sub->add_option("--ref", ctx.ref, "reference connection B0");
    if (n == "gauge-law" || n == "apply") sub->add_option("--gauge", ctx.gauge, "gauge transformation file");
    if (n.rfind("gen-", 0) == 0 || n == "apply" || n == "relax" || n == "flat-gauge")
      sub->add_option("--out", ctx.out, "output field file");
    if (n == "relax" || n == "profile" || n == "asd") sub->add_option("--csv", ctx.csv, "CSV output file");
    if (n == "gen-random") sub->add_option("--dim", ctx.dim, "3 or 4");
    if (n == "gen-gauge") sub->add_flag("--random", ctx.random, "random smooth gauge instead of bumps");
    if (n == "selftest") {
      sub->add_flag("--inject-sign-flip", ctx.inject_sign_flip, "flip the sign of the charge density");
      sub->add_flag("--inject-order-downgrade", ctx.inject_order_downgrade, "use second-order stencils");
      sub->add_option("--only", ctx.only, "run only these criteria")->delimiter(',');
    }
  }

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_code::ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_code::ok;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return exit_code::usage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  Report rep(out);
  try {
    if (!config_path.empty())
      for (const auto& key : load_config_file(ctx.cfg, config_path))
        if (key == "group") ctx.group_explicit = true;
    for (const auto& [key, owner, opt] : options)
      if (owner == sub && opt->count() > 0) {
        ctx.cfg.set(key, values[key]);
        if (key == "group") ctx.group_explicit = true;
      }
    ctx.cfg.validate();

    std::ostringstream body;
    Report brep(body);
    int code = exit_code::ok;
    std::string diagnostic;
    try {
      if (name == "selftest") {
        out << "command=" << name << '\n';
        ctx.cfg.echo(out);
        return selftest_cmd(ctx, rep);
      }
      with_group(ctx.cfg.group, [&](auto g) {
        using G = decltype(g);
        if (name == "gen-flat") gen_flat_cmd<G>(ctx, brep);
        else if (name == "gen-gauge") gen_gauge_cmd<G>(ctx, brep);
        else if (name == "gen-random") gen_random_cmd<G>(ctx, brep);
        else if (name == "apply") apply_cmd<G>(ctx, brep);
        else if (name == "cs") cs_cmd<G>(ctx, brep);
        else if (name == "cs-diff") cs_diff_cmd<G>(ctx, brep);
        else if (name == "degree") degree_cmd<G>(ctx, brep);
        else if (name == "gauge-law") gauge_law_cmd<G>(ctx, brep);
        else if (name == "flat-gauge") flat_gauge_cmd<G>(ctx, brep);
        else if (name == "charge") charge_cmd<G>(ctx, brep);
        else if (name == "asd") asd_cmd<G>(ctx, brep);
        else if (name == "relax") relax_cmd<G>(ctx, brep);
        else if (name == "profile") profile_cmd<G>(ctx, brep);
      });
    } catch (const numerical_diagnostic& e) {
      code = exit_code::numerical;
      diagnostic = e.what();
    } catch (const unsupported_input& e) {
      code = exit_code::numerical;
      diagnostic = e.what();
    }
    // Files may have changed the effective group and sizes; echo after loading.
    out << "command=" << name << '\n';
    ctx.cfg.echo(out);
    out << body.str();
    if (code != exit_code::ok) {
      rep("diagnostic", diagnostic);
      err << "numerical diagnostic: " << diagnostic << '\n';
    }
    return code;
  } catch (const format_error& e) {
    err << e.what() << '\n';
    return exit_code::format;
  } catch (const usage_error& e) {
    err << "usage error: " << e.what() << '\n';
    return exit_code::usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::usage;
  }
}

}  // namespace igauge
