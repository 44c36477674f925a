#include "degenstein/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include <json.hpp>

namespace degenstein {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// non-finite numbers become null in the JSON output
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

json opt_num(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

std::ofstream open_out(const RunOutputs& out, const std::string& name) {
  std::error_code ec;
  fs::create_directories(out.dir, ec);
  if (ec) fail(ErrorKind::io, "cannot create output directory " + out.dir.string());
  std::ofstream f(out.dir / name);
  if (!f) fail(ErrorKind::io, "cannot write " + (out.dir / name).string());
  return f;
}

void write_json(const RunOutputs& out, const std::string& name, const json& j) {
  auto f = open_out(out, name);
  f << j.dump(2) << '\n';
  if (!f) fail(ErrorKind::io, "write failed for " + name);
}

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void say(const RunOutputs& out, const std::string& line) {
  if (!out.quiet && out.log) *out.log << line << '\n';
}

json to_json(const AssumptionReport& r) {
  json v = json::array();
  for (const auto& x : r.verdicts) {
    v.push_back({{"name", x.name}, {"pass", x.pass}, {"margin", num(x.margin)}, {"detail", x.detail}});
  }
  return {{"profile", r.profile},
          {"Lambda", num(r.Lambda)},
          {"A_est", num(r.A_est)},
          {"B_est", num(r.B_est)},
          {"C1_est", num(r.C1_est)},
          {"C1_small_s", num(r.C1_small_s)},
          {"C2_residual", num(r.C2_residual)},
          {"mu_used", num(r.mu_used)},
          {"almost_dec_c", num(r.almost_dec_c)},
          {"sPprimeI_sup", num(r.sPprimeI_sup)},
          {"sPprimeI_limit", num(r.sPprimeI_limit)},
          {"all_pass", r.all_pass()},
          {"verdicts", v}};
}

void write_field_rows(std::ostream& f, const GridSpec& grid, double t, const std::vector<double>& u) {
  for (std::size_t c = 0; c < u.size(); ++c) {
    const auto x = grid.center_of(c);
    f << g17(t) << ',' << g17(x[0]) << ',';
    if (grid.dim == 2) f << g17(x[1]) << ',';
    f << g17(u[c]) << '\n';
  }
}

double default_tau0(const Experiment& ex, const GridSpec& grid) {
  const auto& k = ex.cfg.kinetic;
  if (k.tau0) return *k.tau0;
  // sigma = sigma_cells h at the bump peak: sigma^2 = 2 tau0 u^-a P(u)
  const double u = ex.cfg.eps + ex.cfg.bump.height;
  const double sigma = k.sigma_cells * grid.h(0);
  return sigma * sigma * std::pow(u, k.a) / (2.0 * ex.profile.P(u));
}

}  // namespace

Experiment Experiment::build(const ExperimentConfig& cfg) {
  cfg.validate();
  Experiment ex;
  ex.cfg = cfg;
  ex.profile = make_profile(cfg.profile);
  ex.lam = make_lambda(cfg, ex.profile);
  ex.table = std::make_shared<const CoefficientTable>(make_table(cfg, ex.profile, ex.lam));
  return ex;
}

EpsProblem Experiment::problem(double eps, double T) const {
  EpsProblem p;
  p.eps = eps;
  p.T = T;
  p.table = table;
  p.u_max = cfg.u_max.value_or(table->M());
  p.g = tent_bump(cfg.bump.center, cfg.bump.radius, cfg.bump.height);
  const auto psi = cfg.psi;
  const int dim = cfg.grid.dim;
  p.psi = [psi, dim](const std::array<double, 2>& x) {
    return psi.c0 + psi.c1[0] * x[0] + (dim == 2 ? psi.c1[1] * x[1] : 0.0);
  };
  return p;
}

LocalizationRun localize(const Experiment& ex, Exec exec) {
  const auto& cfg = ex.cfg;
  const auto& L = cfg.localization;
  LocalizationRun run;
  run.cutoffs = CutoffFamily::make(L.x0, L.R, L.Rp, cfg.grid.dim);
  run.cutoffs.check_inside(cfg.grid);
  // C1 from the table; the control has F' = 0 and uses C1 = 1
  const double C1 = ex.table->is_control() ? 1.0 : check_A1(*ex.table).C1_est;
  run.pack = ExponentPack::make(cfg.grid.dim, ex.lam, C1 > 0.0 ? C1 : 1.0, run.cutoffs,
                                cfg.exponents.j, cfg.exponents.S);

  const auto prob = ex.problem();
  SupportMonitor monitor(cfg.grid, L.x0, L.Rp, cfg.eps, cfg.tol_support(), cfg.T / 200.0);
  SolveOptions opt;
  opt.exec = exec;
  opt.observer = [&monitor](const StepView& s) { monitor(s); };
  run.trace = solve(prob, cfg.grid, cfg.snapshot_times(), opt);
  run.de_giorgi = de_giorgi(run.trace, cfg.grid, run.cutoffs, run.pack, *ex.table, L.n_max,
                            std::nullopt, L.slack);
  run.arrival = monitor.arrival();
  run.support_time = run.arrival ? *run.arrival : cfg.T;
  run.all_interior = monitor.all_interior();
  run.all_interior_persisted = run.all_interior && monitor.all_interior_persisted();
  run.front = monitor.samples();
  return run;
}

KineticComparison compare_kinetic(const Experiment& ex, Exec exec) {
  const auto& cfg = ex.cfg;
  const auto& k = cfg.kinetic;
  KineticComparison out;
  out.t = k.T;
  auto at = [&](const GridSpec& grid, std::vector<double>* kin, std::vector<double>* pde,
                double* mass, std::size_t* steps) {
    const auto prob = ex.problem(cfg.eps, k.T);
    SolveOptions opt;
    opt.exec = exec;
    opt.keep_snapshots = false;
    const auto ref = solve(prob, grid, {}, opt);
    const auto u0 = initial_field(prob, grid);
    const auto model = JumpModel::from_profile(ex.profile, default_tau0(ex, grid), k.a, k.shape);
    auto run = run_kinetic(u0, grid, model, SinkTerm::none(), k.T, k.dt_fraction, k.form, exec);
    *mass = total_mass(grid, u0);
    if (steps) *steps = run.steps;
    const double d = l1_distance(grid, run.final_field, ref.snapshots.back());
    if (kin) *kin = std::move(run.final_field);
    if (pde) *pde = ref.snapshots.back();
    return d;
  };
  out.l1 = at(cfg.grid, &out.kinetic, &out.pde, &out.mass, &out.steps);
  out.relative = out.l1 / out.mass;
  double mass_fine = 0.0;
  out.relative_refined = at(cfg.grid.refined(2), nullptr, nullptr, &mass_fine, nullptr) / mass_fine;
  out.decreasing = out.relative_refined < out.relative;

  out.tau0 = default_tau0(ex, cfg.grid);
  const auto model = JumpModel::from_profile(ex.profile, out.tau0, k.a, k.shape);
  const double peak = cfg.eps + cfg.bump.height;
  out.sigma = std::sqrt(model.sigma2(peak));
  out.moments = kernel_moments(model, peak, cfg.grid);
  out.variance_target = model.sigma2(peak);

  // mass bookkeeping of the conservative form on the same data
  const auto u0 = initial_field(ex.problem(cfg.eps, k.T), cfg.grid);
  const auto scat = run_kinetic(u0, cfg.grid, model, SinkTerm::none(), k.T, k.dt_fraction,
                                MasterForm::scatter, exec);
  for (double m : scat.mass_history) {
    out.scatter_mass_drift = std::max(out.scatter_mass_drift, std::abs(m / scat.mass_history[0] - 1.0));
  }
  return out;
}

void run_table(const Experiment& ex, const RunOutputs& out) {
  auto f = open_out(out, "table.csv");
  ex.table->write_csv(f);
  say(out, "table.csv: " + std::to_string(ex.table->size()) + " nodes on [" +
               g17(ex.table->s_min()) + ", " + g17(ex.table->M()) + "]");
}

std::string report_json(const AssumptionReport& report) { return to_json(report).dump(2); }

std::string error_json(ErrorKind kind, const std::string& message) {
  return json{{"error", {{"kind", std::string(to_string(kind))},
                         {"code", static_cast<int>(kind)},
                         {"message", message}}}}
      .dump();
}

void run_check(const Experiment& ex, const RunOutputs& out) {
  json j;
  if (ex.table->is_control()) {
    j = {{"profile", ex.profile.name}, {"control", true},
         {"note", "P is constant: the degenerate-profile assumptions do not apply"}};
    say(out, "report.json: nondegenerate control, no verdicts");
  } else {
    const auto r = check_assumptions(ex.profile, ex.lam, *ex.table);
    j = to_json(r);
    say(out, "report.json: A_est " + g17(r.A_est) + ", B_est " + g17(r.B_est) +
                 (r.all_pass() ? ", all verdicts pass" : ", some verdicts fail"));
  }
  write_json(out, "report.json", j);
}

void run_solve(const Experiment& ex, const RunOutputs& out) {
  const auto& cfg = ex.cfg;
  const auto prob = ex.problem();
  const auto tr = solve(prob, cfg.grid, cfg.snapshot_times());
  {
    auto f = open_out(out, "snapshots.csv");
    f << (cfg.grid.dim == 2 ? "t,x,y,u\n" : "t,x,u\n");
    for (std::size_t k = 0; k < tr.times.size(); ++k) write_field_rows(f, cfg.grid, tr.times[k], tr.snapshots[k]);
  }
  const double residual = energy_identity_residual(tr, prob);
  write_json(out, "solve.json",
             {{"steps", tr.steps},
              {"times", nums(tr.times)},
              {"min_u", num(tr.min_u)},
              {"max_u", num(tr.max_u)},
              {"max_D", num(tr.max_D)},
              {"boundary_mismatch", num(tr.boundary_mismatch)},
              {"energy",
               {{"E0", num(tr.energy.E0)},
                {"ET", num(tr.energy.ET)},
                {"dissipation", num(tr.energy.dissipation)},
                {"defect", num(tr.energy.defect)},
                {"residual", num(residual)}}}});
  say(out, "snapshots.csv: " + std::to_string(tr.times.size()) + " snapshots, " +
               std::to_string(tr.steps) + " steps, energy residual " + g17(residual));
}

void run_localize(const Experiment& ex, const RunOutputs& out) {
  const auto run = localize(ex);
  const auto& dg = run.de_giorgi;
  const auto& p = run.pack;
  write_json(out, "degiorgi.json",
             {{"T_prime", num(dg.T_prime)},
              {"T_eval", num(dg.T_eval)},
              {"Y", nums(dg.Y)},
              {"bound", nums(dg.bound)},
              {"threshold", num(dg.threshold)},
              {"slack", num(dg.slack)},
              {"inequality_holds", dg.inequality_holds},
              {"nonincreasing", dg.nonincreasing},
              {"below_threshold", dg.below_threshold},
              {"pack",
               {{"N", p.N}, {"j", num(p.j)}, {"k", num(p.k)}, {"beta", num(p.beta)},
                {"lambda", num(p.lambda)}, {"Lambda", num(p.Lambda)}, {"C1", num(p.C1)},
                {"S", num(p.S)}, {"D", num(p.D)}, {"b", num(run.cutoffs.b)}}},
              {"support",
               {{"tol_support", num(ex.cfg.tol_support())},
                {"arrival", opt_num(run.arrival)},
                {"support_time", num(run.support_time)},
                {"all_interior", opt_num(run.all_interior)},
                {"all_interior_persisted", run.all_interior_persisted}}}});
  auto f = open_out(out, "front.csv");
  f << "t,r_front,r_empty\n";
  for (const auto& s : run.front) {
    f << g17(s.t) << ',' << g17(s.r_front) << ',' << (std::isfinite(s.r_empty) ? g17(s.r_empty) : "inf")
      << '\n';
  }
  say(out, "degiorgi.json: T' " + g17(dg.T_prime) + ", inner ball empty until " +
               g17(run.support_time) + (run.arrival ? "" : " (end of run)"));
}

void run_kinetic_compare(const Experiment& ex, const RunOutputs& out) {
  const auto c = compare_kinetic(ex);
  write_json(out, "kinetic.json",
             {{"t", num(c.t)},
              {"sigma", num(c.sigma)},
              {"tau0", num(c.tau0)},
              {"steps", c.steps},
              {"mass", num(c.mass)},
              {"l1", num(c.l1)},
              {"relative", num(c.relative)},
              {"relative_refined", num(c.relative_refined)},
              {"decreasing", c.decreasing},
              {"moments",
               {{"mass", num(c.moments.mass)}, {"mean", num(c.moments.mean)},
                {"variance", num(c.moments.variance)}, {"variance_target", num(c.variance_target)}}},
              {"scatter_mass_drift", num(c.scatter_mass_drift)}});
  auto f = open_out(out, "kinetic.csv");
  const auto& grid = ex.cfg.grid;
  f << (grid.dim == 2 ? "x,y,u_kinetic,u_pde\n" : "x,u_kinetic,u_pde\n");
  for (std::size_t i = 0; i < c.kinetic.size(); ++i) {
    const auto x = grid.center_of(i);
    f << g17(x[0]) << ',';
    if (grid.dim == 2) f << g17(x[1]) << ',';
    f << g17(c.kinetic[i]) << ',' << g17(c.pde[i]) << '\n';
  }
  say(out, "kinetic.json: L1 / mass " + g17(c.relative) + ", refined " + g17(c.relative_refined));
}

void run_sweep(const Experiment& ex, const RunOutputs& out) {
  const auto& cfg = ex.cfg;
  const auto sweep = eps_sweep(ex.problem(cfg.eps_sweep.front(), cfg.T), cfg.grid, cfg.eps_sweep);
  write_json(out, "sweep.json", {{"eps", nums(sweep.eps)},
                                 {"distances", nums(sweep.distances)},
                                 {"decreasing", sweep.decreasing}});
  auto f = open_out(out, "sweep.csv");
  f << "eps,eps_next,l1\n";
  for (std::size_t k = 0; k < sweep.distances.size(); ++k) {
    f << g17(sweep.eps[k]) << ',' << g17(sweep.eps[k + 1]) << ',' << g17(sweep.distances[k]) << '\n';
  }
  say(out, std::string("sweep.json: distances ") +
               (sweep.decreasing ? "decreasing" : "not decreasing"));
}

void run_all(const Experiment& ex, const RunOutputs& out) {
  run_table(ex, out);
  run_check(ex, out);
  run_solve(ex, out);
  run_localize(ex, out);
}

}  // namespace degenstein
