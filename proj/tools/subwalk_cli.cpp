#include "subwalk/bernstein.hpp"
#include "subwalk/capacity.hpp"
#include "subwalk/errors.hpp"
#include "subwalk/green.hpp"
#include "subwalk/lattice_sets.hpp"
#include "subwalk/massiveness.hpp"
#include "subwalk/montecarlo.hpp"
#include "subwalk/renewal.hpp"
#include "subwalk/report.hpp"

#include "CLI11.hpp"

#include <omp.h>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace subwalk;

namespace {

enum Exit { kOk = 0, kDomain = 2, kBudget = 3, kSolver = 4 };

struct Common {
  std::string format = "json";
  std::string output;
  int threads = 0;
};

struct PsiArgs {
  double alpha = 1.0;
  double gamma = 0.0;  // > 0 selects the log-power family
  BernsteinSpec spec() const { return gamma > 0.0 ? BernsteinSpec::log_power(alpha, gamma) : BernsteinSpec::power(alpha); }
};

void add_psi(CLI::App* c, PsiArgs& p) {
  c->add_option("--alpha", p.alpha, "index of psi in (0, 2]")->capture_default_str();
  c->add_option("--log-gamma", p.gamma, "use psi(l) = l^{alpha/2} log(e + 1/l)^{-gamma} when > 0");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string t;
  while (std::getline(ss, t, sep))
    if (!t.empty()) out.push_back(t);
  return out;
}

template <class T>
std::vector<T> parse_list(const std::string& s) {
  std::vector<T> out;
  for (const auto& t : split(s, ',')) {
    std::istringstream is(t);
    T v{};
    if (!(is >> v) || !is.eof()) throw DomainError("bad list entry '" + t + "'");
    out.push_back(v);
  }
  if (out.empty()) throw DomainError("empty list");
  return out;
}

Stopping parse_stopping(const std::string& s) {
  const auto t = split(s, ':');
  if (t.size() == 2 && t[0] == "horizon") return Horizon{static_cast<std::uint64_t>(std::stod(t[1]))};
  if ((t.size() == 2 || t.size() == 3) && t[0] == "escape") {
    const double r = std::stod(t[1]);
    const std::uint64_t max = t.size() == 3 ? static_cast<std::uint64_t>(std::stod(t[2])) : (std::uint64_t{1} << 40);
    if (!(r > 0.0)) throw DomainError("escape radius must be > 0");
    return EscapeRadius{r, max};
  }
  throw DomainError("stopping must be horizon:H or escape:R[:max]");
}

// Emits {manifest, result} as JSON, or the table as CSV with a sidecar manifest when writing to a file.
void emit(const Common& c, RunManifest m, const Json& result, const CsvTable& table) {
  if (!c.output.empty()) {
    m.outputs.push_back(c.output);
    if (c.format == "csv") m.outputs.push_back(c.output + ".manifest.json");
  }
  std::ofstream file;
  if (!c.output.empty()) {
    file.open(c.output);
    if (!file) throw DomainError("cannot write '" + c.output + "'");
  }
  std::ostream& out = c.output.empty() ? std::cout : file;
  if (c.format == "csv") {
    table.write(out);
    if (!c.output.empty()) {
      std::ofstream man(c.output + ".manifest.json");
      man << to_json(m).dump(2) << '\n';
    }
  } else {
    Json j;
    j["manifest"] = to_json(m);
    j["result"] = result;
    out << j.dump(2) << '\n';
  }
}

CsvTable scan_table(const std::vector<ScanRow>& rows) {
  CsvTable t{{"parameter", "n_points", "capacity", "normalizer", "ratio", "doubling"}, {}};
  for (const auto& r : rows)
    t.add({fmt(r.parameter), std::to_string(r.n_points), fmt(r.capacity), fmt(r.normalizer), fmt(r.ratio), fmt(r.doubling)});
  return t;
}

PointSet finite_set(const LatticeSetSpec& s) {
  if (auto* e = std::get_if<LatticeSetSpec::Explicit>(&s.kind)) return e->points;
  if (auto* b = std::get_if<LatticeSetSpec::Ball>(&s.kind)) return lattice_ball(s.d, b->radius);
  if (auto* c = std::get_if<LatticeSetSpec::Cylinder>(&s.kind)) return lattice_cylinder(s.d, c->length, c->base);
  throw DomainError("capacity needs a finite set (ball, cylinder, points or file); use wiener for infinite sets");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subordinated random walks on Z^d: coefficients, Green functions, capacities and massiveness"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--format", common.format, "output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_option("--output,-o", common.output, "write to this file instead of stdout");
  app.add_option("--threads", common.threads, "cap on worker threads (0 = runtime default)");
  app.set_version_flag("--version", SUBWALK_VERSION);

  // coeffs
  auto* coeffs = app.add_subcommand("coeffs", "subordination coefficients c(psi, n) and partial sums");
  PsiArgs cpsi;
  std::size_t cn = 10;
  add_psi(coeffs, cpsi);
  coeffs->add_option("--n", cn, "number of coefficients")->capture_default_str();

  // renewal
  auto* renewal = app.add_subcommand("renewal", "renewal sequence C(n), checks of monotonicity and log-convexity");
  PsiArgs rpsi;
  std::size_t rn = 10;
  add_psi(renewal, rpsi);
  renewal->add_option("--n", rn, "largest n")->capture_default_str();

  // green
  auto* green = app.add_subcommand("green", "Green function G(x) with error bound and asymptotic comparison");
  PsiArgs gpsi;
  int gdim = 3;
  std::string gx = "0,0,0";
  GreenOptions gopt;
  add_psi(green, gpsi);
  green->add_option("--dim", gdim, "dimension")->capture_default_str();
  green->add_option("--x", gx, "lattice point, comma separated")->capture_default_str();
  green->add_option("--tol", gopt.tolerance, "accepted relative error bound")->capture_default_str();
  green->add_option("--exact-steps", gopt.exact_steps, "steps summed exactly")->capture_default_str();
  bool goracle = false;
  green->add_flag("--fourier", goracle, "also evaluate the Fourier-integral oracle");

  // riesz
  auto* riesz = app.add_subcommand("riesz", "ratio of the Riesz kernel to the Green function along an axis");
  PsiArgs zpsi;
  int zdim = 3;
  std::string zradii = "20,40,60";
  add_psi(riesz, zpsi);
  riesz->add_option("--dim", zdim)->capture_default_str();
  riesz->add_option("--radii", zradii)->capture_default_str();

  // capacity
  auto* capacity = app.add_subcommand("capacity", "capacity and equilibrium measure of a finite set, or scans");
  PsiArgs kpsi;
  int kdim = 3;
  std::string kset = "ball:2", kmethod = "linear", kscan_ball, kscan_cyl, kscale, kpoints_out;
  double kbase = 2.0;
  bool khalo = false;
  add_psi(capacity, kpsi);
  capacity->add_option("--dim", kdim)->capture_default_str();
  capacity->add_option("--set", kset, "finite set: ball:r, cylinder:L:base, points:x;y;..., file:path")->capture_default_str();
  capacity->add_option("--method", kmethod)->check(CLI::IsMember({"linear", "variational", "both"}))->capture_default_str();
  capacity->add_option("--scan-balls", kscan_ball, "radii for Cap(B_r)/(r^d psi(1/r^2))");
  capacity->add_option("--scan-cylinders", kscan_cyl, "lengths for Cap(F_L)/L");
  capacity->add_option("--base", kbase, "cylinder base radius for --scan-cylinders")->capture_default_str();
  capacity->add_option("--scales", kscale, "dilation factors for Cap(s A)/s^{d-alpha} with A = --set");
  capacity->add_flag("--halo", khalo, "report the largest potential just outside the set");
  capacity->add_option("--points-out", kpoints_out, "write the point set to this file");

  // wiener
  auto* wiener = app.add_subcommand("wiener", "dyadic-shell Wiener test with computed capacities");
  PsiArgs wpsi;
  int wdim = 3, wkmin = 0, wkmax = 5;
  std::string wset = "axis";
  std::size_t wbudget = kShellBudget;
  add_psi(wiener, wpsi);
  wiener->add_option("--dim", wdim)->capture_default_str();
  wiener->add_option("--set", wset, "axis, hyperplane[:i], cone:delta, thorn:<profile>:<p>, ...")->capture_default_str();
  wiener->add_option("--kmin", wkmin)->capture_default_str();
  wiener->add_option("--kmax", wkmax)->capture_default_str();
  wiener->add_option("--budget", wbudget, "points per shell before subsampling")->capture_default_str();

  // thorn
  auto* thorn = app.add_subcommand("thorn", "thorn classification by the series or inscribed-ball rule");
  int tdim = 3, tshells = 0;
  double talpha = 1.0, tparam = std::nan("");
  std::string tprofile = "linoverlog";
  thorn->add_option("--profile", tprofile)->check(CLI::IsMember({"linear", "power", "linoverlog"}))->capture_default_str();
  auto* o_beta = thorn->add_option("--beta", tparam, "parameter of linoverlog");
  auto* o_gamma = thorn->add_option("--gamma", tparam, "parameter of power");
  auto* o_delta = thorn->add_option("--delta", tparam, "parameter of linear");
  auto* o_param = thorn->add_option("--param", tparam, "profile parameter");
  o_beta->excludes(o_gamma)->excludes(o_delta)->excludes(o_param);
  o_gamma->excludes(o_delta)->excludes(o_param);
  o_delta->excludes(o_param);
  thorn->add_option("--dim", tdim)->capture_default_str();
  thorn->add_option("--alpha", talpha)->capture_default_str();
  thorn->add_option("--shells", tshells, "compare shell-capacity terms for n = 1..shells (thin thorns)");

  // hyperplane
  auto* hyper = app.add_subcommand("hyperplane", "partial return integrals of the projected walk");
  int hdim = 3;
  double halpha = 1.0;
  std::string heps = "1e-2,1e-3,1e-4,1e-5,1e-6";
  hyper->add_option("--alpha", halpha)->capture_default_str();
  hyper->add_option("--dim", hdim)->capture_default_str();
  hyper->add_option("--eps", heps)->capture_default_str();

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo hitting probabilities");
  PsiArgs spsi;
  int sdim = 3;
  std::string sset = "axis", sstart, sstop = "horizon:16384", sdist, shor;
  std::uint64_t strials = 1000, sseed = 1;
  add_psi(sim, spsi);
  sim->add_option("--dim", sdim)->capture_default_str();
  sim->add_option("--set", sset)->capture_default_str();
  sim->add_option("--start", sstart, "start point (default: distance 10 from the set)");
  sim->add_option("--trials", strials)->capture_default_str();
  sim->add_option("--seed", sseed)->capture_default_str();
  sim->add_option("--stopping", sstop, "horizon:H or escape:R[:max]")->capture_default_str();
  sim->add_option("--distances", sdist, "trend mode: start distances");
  sim->add_option("--horizons", shor, "trend mode: nested horizons");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    for (auto* s : app.get_subcommands()) std::cerr << s->help();
    return kDomain;
  }
  if (common.threads > 0) omp_set_num_threads(common.threads);

  try {
    if (*coeffs) {
      const BernsteinSpec spec = cpsi.spec();
      const auto c = coefficients(spec, cn);
      Json rows = Json::array();
      CsvTable t{{"n", "c", "partial_sum"}, {}};
      double acc = 0.0;
      for (std::size_t n = 1; n <= cn; ++n) {
        acc += c[n];
        rows.push_back({{"n", n}, {"c", c[n]}, {"partial_sum", acc}});
        t.add({std::to_string(n), fmt(c[n]), fmt(acc)});
      }
      emit(common, make_manifest("coeffs", {{"psi", spec.describe()}, {"n", cn}}),
           {{"psi", spec.describe()}, {"rows", rows}}, t);
    } else if (*renewal) {
      const BernsteinSpec spec = rpsi.spec();
      const auto seq = renewal_sequence(coefficients(spec, std::min<std::size_t>(rn, kSeriesMaxTerms)), rn);
      Json rows = Json::array();
      CsvTable t{{"n", "C"}, {}};
      for (std::size_t n = 0; n <= rn; ++n) {
        rows.push_back({{"n", n}, {"C", seq[n]}});
        t.add({std::to_string(n), fmt(seq[n])});
      }
      const auto dec = check_decreasing(seq);
      const auto lc = check_log_convexity(seq);
      emit(common, make_manifest("renewal", {{"psi", spec.describe()}, {"n", rn}}),
           {{"psi", spec.describe()},
            {"source", to_string(seq.source)},
            {"decreasing", dec.holds},
            {"log_convex", lc.holds},
            {"rows", rows}},
           t);
    } else if (*green) {
      const BernsteinSpec spec = gpsi.spec();
      const LatticePoint x = parse_point(gx);
      if (x.dim() != gdim) throw DomainError("--x has dimension " + std::to_string(x.dim()));
      GreenEvaluator ev(gdim, spec, gopt);
      const GreenValue v = ev.green_full(x);
      Json r = to_json(v);
      r["x"] = x.coords;
      r["norm"] = x.norm();
      if (!x.is_origin() && spec.is_power()) {
        const double a = spec.alpha();
        const double C = asymptotic_constant(gdim, a);
        r["asymptotic_constant"] = C;
        r["ratio_to_constant"] = v.value * std::pow(x.norm(), gdim - a) / C;
      }
      if (goracle) r["fourier"] = fourier_oracle(gdim, spec, x).value;
      CsvTable t{{"x", "value", "error_bound", "ratio_to_constant"}, {}};
      t.add({x.str(), fmt(v.value), fmt(v.error_bound),
             r.contains("ratio_to_constant") ? fmt(r["ratio_to_constant"].get<double>()) : ""});
      emit(common,
           make_manifest("green", {{"psi", spec.describe()}, {"dim", gdim}, {"x", x.coords}, {"tol", gopt.tolerance},
                                   {"exact_steps", gopt.exact_steps}}),
           r, t);
    } else if (*riesz) {
      const BernsteinSpec spec = zpsi.spec();
      GreenEvaluator ev(zdim, spec);
      const RieszReport rep = ratio_to_riesz(ev, parse_list<int>(zradii));
      CsvTable t{{"radius", "green", "riesz", "ratio"}, {}};
      for (const auto& r : rep.rows) t.add({fmt(r.radius), fmt(r.green), fmt(r.riesz), fmt(r.ratio)});
      emit(common, make_manifest("riesz", {{"psi", spec.describe()}, {"dim", zdim}, {"radii", zradii}}), to_json(rep), t);
    } else if (*capacity) {
      const BernsteinSpec spec = kpsi.spec();
      GreenEvaluator ev(kdim, spec);
      Json params{{"psi", spec.describe()}, {"dim", kdim}, {"set", kset}, {"method", kmethod}};
      if (!kscan_ball.empty() || !kscan_cyl.empty()) {
        std::vector<ScanRow> rows;
        if (!kscan_ball.empty()) {
          rows = ball_capacity_scan(ev, parse_list<double>(kscan_ball));
          params["scan_balls"] = kscan_ball;
        } else {
          rows = cylinder_capacity_scan(ev, parse_list<std::int64_t>(kscan_cyl), kbase);
          params["scan_cylinders"] = kscan_cyl;
          params["base"] = kbase;
        }
        Json jr = Json::array();
        for (const auto& r : rows) jr.push_back(to_json(r));
        emit(common, make_manifest("capacity", params), {{"rows", jr}, {"band", ratio_band(rows)}}, scan_table(rows));
      } else {
        const PointSet set = finite_set(parse_set(kset, kdim));
        if (!kpoints_out.empty()) {
          std::ofstream f(kpoints_out);
          set.write(f);
        }
        if (!kscale.empty()) {
          const auto rows = scaling_check(ev, set, parse_list<int>(kscale));
          Json jr = Json::array();
          for (const auto& r : rows) jr.push_back(to_json(r));
          params["scales"] = kscale;
          emit(common, make_manifest("capacity", params), {{"rows", jr}, {"band", ratio_band(rows)}}, scan_table(rows));
        } else {
          Json res = Json::array();
          CsvTable t{{"method", "capacity", "residual", "n_points", "d", "alpha"}, {}};
          auto add = [&](const CapacityResult& r) {
            Json j = to_json(r);
            if (khalo) j["max_halo_potential"] = max_halo_potential(ev, set, r.equilibrium);
            res.push_back(j);
            t.add({to_string(r.method), fmt(r.capacity), fmt(r.residual), std::to_string(r.n_points),
                   std::to_string(r.d), fmt(r.alpha)});
          };
          if (kmethod != "variational") add(equilibrium(ev, set));
          if (kmethod != "linear") add(capacity_variational(ev, set));
          emit(common, make_manifest("capacity", params), res.size() == 1 ? res[0] : res, t);
        }
      }
    } else if (*wiener) {
      const BernsteinSpec spec = wpsi.spec();
      GreenEvaluator ev(wdim, spec);
      WienerOptions opt;
      opt.shell_budget = wbudget;
      const WienerReport rep = wiener_test(ev, parse_set(wset, wdim), wkmin, wkmax, opt);
      emit(common,
           make_manifest("wiener", {{"psi", spec.describe()}, {"dim", wdim}, {"set", wset}, {"kmin", wkmin},
                                    {"kmax", wkmax}, {"budget", wbudget}}),
           to_json(rep), to_csv(rep));
    } else if (*thorn) {
      if (std::isnan(tparam)) throw DomainError("thorn needs --beta, --gamma, --delta or --param");
      const ThornProfile p = tprofile == "linear"  ? ThornProfile::linear(tparam)
                             : tprofile == "power" ? ThornProfile::power(tparam)
                                                   : ThornProfile::lin_over_log(tparam);
      const ThornClassification c = classify_thorn(p, tdim, talpha);
      Json r = to_json(c);
      r["profile"] = p.describe();
      CsvTable t{{"n", "term"}, {}};
      if (c.terms)
        for (std::size_t i = 0; i < c.terms->n.size(); ++i) t.add({std::to_string(c.terms->n[i]), fmt(c.terms->terms[i])});
      if (tshells > 0 && c.terms) {
        GreenEvaluator ev(tdim, BernsteinSpec::power(talpha));
        r["consistency"] = to_json(thorn_consistency(ev, p, 1, tshells));
      }
      emit(common,
           make_manifest("thorn", {{"profile", p.describe()}, {"dim", tdim}, {"alpha", talpha}, {"shells", tshells}}), r,
           t);
    } else if (*hyper) {
      const HyperplaneReport rep = hyperplane_return_sum(hdim, halpha, parse_list<double>(heps));
      Json r = to_json(rep);
      r["log_rate_per_decade"] = hyperplane_log_rate(hdim);
      emit(common, make_manifest("hyperplane", {{"dim", hdim}, {"alpha", halpha}, {"eps", heps}}), r, to_csv(rep));
    } else if (*sim) {
      const BernsteinSpec spec = spsi.spec();
      const LatticeSetSpec set = parse_set(sset, sdim);
      SimConfig cfg;
      cfg.d = sdim;
      cfg.spec = spec;
      cfg.trials = strials;
      cfg.master_seed = sseed;
      cfg.stopping = parse_stopping(sstop);
      Json params{{"psi", spec.describe()}, {"dim", sdim},      {"set", sset},
                  {"trials", strials},     {"seed", sseed},     {"stopping", sstop}};
      if (!sdist.empty() || !shor.empty()) {
        const auto dist = parse_list<std::int64_t>(sdist.empty() ? "10" : sdist);
        const auto hor = parse_list<std::uint64_t>(shor.empty() ? "1024,4096,16384" : shor);
        params["distances"] = sdist;
        params["horizons"] = shor;
        const TrendReport rep = massiveness_trend(cfg, set, dist, hor);
        emit(common, make_manifest("simulate", params, sseed), to_json(rep), to_csv(rep.rows));
      } else {
        cfg.start = sstart.empty() ? set.start_at_distance(10) : parse_point(sstart);
        params["start"] = cfg.start.coords;
        std::unique_ptr<GreenEvaluator> ev;
        if (std::holds_alternative<EscapeRadius>(cfg.stopping) && set.is_finite())
          ev = std::make_unique<GreenEvaluator>(sdim, spec);
        const HittingEstimate e = hitting_probability(cfg, set, ev.get());
        emit(common, make_manifest("simulate", params, sseed), to_json(e), to_csv(std::vector<TrendRow>{{0, 0, e}}));
      }
    }
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kDomain;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kBudget;
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kOk;
}
