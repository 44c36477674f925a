#include "degenstein/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "degenstein/checker.hpp"
#include "degenstein/error.hpp"

namespace degenstein {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { fail(ErrorKind::config, what); }

void known_keys(const json& obj, const std::string& where, std::set<std::string> keys) {
  if (!obj.is_object()) bad(where + " must be a JSON object");
  for (const auto& [key, _] : obj.items()) {
    if (!keys.count(key)) bad("unknown key '" + key + "' in " + where);
  }
}

double number(const json& v, const std::string& name) {
  if (!v.is_number()) bad(name + " must be a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& name) {
  if (!v.is_number_integer()) bad(name + " must be an integer");
  return v.get<int>();
}

std::string text(const json& v, const std::string& name) {
  if (!v.is_string()) bad(name + " must be a string");
  return v.get<std::string>();
}

// 1 or 2 components; a bare number is accepted for 1D
std::array<double, 2> point(const json& v, const std::string& name) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (!v.is_array() || v.empty() || v.size() > 2) bad(name + " must be a number or [x] / [x, y]");
  std::array<double, 2> p{0.0, 0.0};
  for (std::size_t i = 0; i < v.size(); ++i) p[i] = number(v[i], name);
  return p;
}

template <class F>
void opt(const json& obj, const char* key, F&& f) {
  if (auto it = obj.find(key); it != obj.end() && !it->is_null()) f(*it);
}

ProfileSpec parse_profile(const json& j) {
  known_keys(j, "profile", {"kind", "beta", "M", "c3", "zeta", "custom_table"});
  ProfileSpec p;
  opt(j, "kind", [&](const json& v) { p.kind = text(v, "profile.kind"); });
  opt(j, "beta", [&](const json& v) { p.beta = number(v, "profile.beta"); });
  opt(j, "M", [&](const json& v) { p.M = number(v, "profile.M"); });
  opt(j, "c3", [&](const json& v) { p.c3 = number(v, "profile.c3"); });
  opt(j, "custom_table", [&](const json& v) { p.custom_table = text(v, "profile.custom_table"); });
  opt(j, "zeta", [&](const json& z) {
    known_keys(z, "profile.zeta", {"kind", "z0", "z1"});
    std::string kind = "affine";
    opt(z, "kind", [&](const json& v) { kind = text(v, "profile.zeta.kind"); });
    opt(z, "z0", [&](const json& v) { p.z0 = number(v, "profile.zeta.z0"); });
    opt(z, "z1", [&](const json& v) { p.z1 = number(v, "profile.zeta.z1"); });
    if (p.kind == "exp_zeta") {
      if (kind != "affine" && kind != "log") bad("profile.zeta.kind must be 'affine' or 'log'");
      p.kind = "exp_zeta_" + kind;
    }
  });
  return p;
}

GridSpec parse_grid(const json& j) {
  known_keys(j, "grid", {"dim", "lo", "hi", "n"});
  int dim = 1;
  opt(j, "dim", [&](const json& v) { dim = integer(v, "grid.dim"); });
  if (dim != 1 && dim != 2) bad("grid.dim must be 1 or 2");
  std::array<double, 2> lo{-1.0, -1.0}, hi{1.0, 1.0};
  std::array<int, 2> n{401, dim == 2 ? 101 : 1};
  if (dim == 2) n[0] = 101;
  opt(j, "lo", [&](const json& v) { lo = point(v, "grid.lo"); });
  opt(j, "hi", [&](const json& v) { hi = point(v, "grid.hi"); });
  opt(j, "n", [&](const json& v) {
    if (v.is_number_integer()) {
      n = {v.get<int>(), dim == 2 ? v.get<int>() : 1};
    } else {
      if (!v.is_array() || static_cast<int>(v.size()) != dim) bad("grid.n must have dim entries");
      for (int a = 0; a < dim; ++a) n[a] = integer(v[a], "grid.n");
    }
  });
  try {
    return dim == 1 ? GridSpec::line(lo[0], hi[0], n[0])
                    : GridSpec::box(lo[0], hi[0], lo[1], hi[1], n[0], n[1]);
  } catch (const Error& e) {
    bad(std::string("grid: ") + e.what());
  }
}

KineticSpec parse_kinetic(const json& j) {
  known_keys(j, "kinetic", {"shape", "form", "tau0", "sigma_cells", "a", "dt_fraction", "T"});
  KineticSpec k;
  opt(j, "shape", [&](const json& v) {
    const auto s = text(v, "kinetic.shape");
    if (s == "gaussian") k.shape = KernelShape::gaussian_truncated;
    else if (s == "triangular") k.shape = KernelShape::triangular;
    else bad("kinetic.shape must be 'gaussian' or 'triangular'");
  });
  opt(j, "form", [&](const json& v) {
    const auto s = text(v, "kinetic.form");
    if (s == "gather") k.form = MasterForm::gather;
    else if (s == "scatter") k.form = MasterForm::scatter;
    else bad("kinetic.form must be 'gather' or 'scatter'");
  });
  opt(j, "tau0", [&](const json& v) { k.tau0 = number(v, "kinetic.tau0"); });
  opt(j, "sigma_cells", [&](const json& v) { k.sigma_cells = number(v, "kinetic.sigma_cells"); });
  opt(j, "a", [&](const json& v) { k.a = number(v, "kinetic.a"); });
  opt(j, "dt_fraction", [&](const json& v) { k.dt_fraction = number(v, "kinetic.dt_fraction"); });
  opt(j, "T", [&](const json& v) { k.T = number(v, "kinetic.T"); });
  return k;
}

ExperimentConfig from_json(const json& j) {
  known_keys(j, "config",
             {"profile", "Lambda", "table", "grid", "eps", "eps_sweep", "bump", "psi",
              "localization", "exponents", "T", "snapshots", "u_max", "kinetic", "output_dir"});
  ExperimentConfig c;
  opt(j, "profile", [&](const json& v) { c.profile = parse_profile(v); });
  opt(j, "Lambda", [&](const json& v) {
    if (v.is_string()) {
      if (v.get<std::string>() != "auto") bad("Lambda must be a number or \"auto\"");
      c.Lambda.reset();
    } else {
      c.Lambda = number(v, "Lambda");
    }
  });
  opt(j, "table", [&](const json& t) {
    known_keys(t, "table", {"K", "s_min", "quad_tol", "tail", "fprime"});
    opt(t, "fprime", [&](const json& v) {
      const auto m = text(v, "table.fprime");
      if (m == "closed_form") c.table.fprime = FprimeMethod::closed_form;
      else if (m == "central_difference") c.table.fprime = FprimeMethod::central_difference;
      else bad("table.fprime must be 'closed_form' or 'central_difference'");
    });
    opt(t, "K", [&](const json& v) {
      const int K = integer(v, "table.K");
      if (K < 16) bad("table.K must be at least 16");
      c.table.K = static_cast<std::size_t>(K);
    });
    opt(t, "s_min", [&](const json& v) { c.table.s_min = number(v, "table.s_min"); });
    opt(t, "quad_tol", [&](const json& v) { c.table.quad_tol = number(v, "table.quad_tol"); });
    opt(t, "tail", [&](const json& v) { c.table.tail = number(v, "table.tail"); });
  });
  opt(j, "grid", [&](const json& v) { c.grid = parse_grid(v); });
  opt(j, "eps", [&](const json& v) { c.eps = number(v, "eps"); });
  opt(j, "eps_sweep", [&](const json& v) {
    if (!v.is_array()) bad("eps_sweep must be an array");
    c.eps_sweep.clear();
    for (const auto& e : v) c.eps_sweep.push_back(number(e, "eps_sweep"));
  });
  opt(j, "bump", [&](const json& b) {
    known_keys(b, "bump", {"center", "radius", "height"});
    opt(b, "center", [&](const json& v) { c.bump.center = point(v, "bump.center"); });
    opt(b, "radius", [&](const json& v) { c.bump.radius = number(v, "bump.radius"); });
    opt(b, "height", [&](const json& v) { c.bump.height = number(v, "bump.height"); });
  });
  opt(j, "psi", [&](const json& p) {
    known_keys(p, "psi", {"c0", "c1"});
    opt(p, "c0", [&](const json& v) { c.psi.c0 = number(v, "psi.c0"); });
    opt(p, "c1", [&](const json& v) { c.psi.c1 = point(v, "psi.c1"); });
  });
  opt(j, "localization", [&](const json& l) {
    known_keys(l, "localization", {"x0", "R", "Rp", "n_max", "tol_support", "slack"});
    opt(l, "x0", [&](const json& v) { c.localization.x0 = point(v, "localization.x0"); });
    opt(l, "R", [&](const json& v) { c.localization.R = number(v, "localization.R"); });
    opt(l, "Rp", [&](const json& v) { c.localization.Rp = number(v, "localization.Rp"); });
    opt(l, "n_max", [&](const json& v) { c.localization.n_max = integer(v, "localization.n_max"); });
    opt(l, "tol_support",
        [&](const json& v) { c.localization.tol_support = number(v, "localization.tol_support"); });
    opt(l, "slack", [&](const json& v) { c.localization.slack = number(v, "localization.slack"); });
  });
  opt(j, "exponents", [&](const json& e) {
    known_keys(e, "exponents", {"j", "S"});
    opt(e, "j", [&](const json& v) { c.exponents.j = number(v, "exponents.j"); });
    opt(e, "S", [&](const json& v) { c.exponents.S = number(v, "exponents.S"); });
  });
  opt(j, "T", [&](const json& v) { c.T = number(v, "T"); });
  opt(j, "snapshots", [&](const json& v) {
    if (v.is_number_integer()) {
      c.snapshot_count = v.get<int>();
      c.snapshots.clear();
    } else if (v.is_array()) {
      c.snapshots.clear();
      for (const auto& t : v) c.snapshots.push_back(number(t, "snapshots"));
    } else {
      bad("snapshots must be a count or an array of times");
    }
  });
  opt(j, "u_max", [&](const json& v) { c.u_max = number(v, "u_max"); });
  opt(j, "kinetic", [&](const json& v) { c.kinetic = parse_kinetic(v); });
  opt(j, "output_dir", [&](const json& v) { c.output_dir = text(v, "output_dir"); });
  c.validate();
  return c;
}

}  // namespace

std::vector<double> ExperimentConfig::snapshot_times() const {
  if (!snapshots.empty()) return snapshots;
  std::vector<double> t;
  for (int k = 1; k <= snapshot_count; ++k) t.push_back(T * k / snapshot_count);
  t.back() = T;
  return t;
}

void ExperimentConfig::validate() const {
  static const std::set<std::string> kinds{"power",        "exp_inv", "exp_zeta_affine",
                                           "exp_zeta_log", "custom",  "constant"};
  if (!kinds.count(profile.kind)) bad("unknown profile kind '" + profile.kind + "'");
  if (profile.kind == "custom" && profile.custom_table.empty())
    bad("custom profile needs profile.custom_table");
  if (!(profile.M > 0.0)) bad("profile.M must be positive");
  if (Lambda && !(*Lambda > 0.0 && std::isfinite(*Lambda))) bad("Lambda must be positive");
  if (!(table.quad_tol > 0.0)) bad("table.quad_tol must be positive");
  if (table.s_min && !(*table.s_min > 0.0 && *table.s_min < profile.M))
    bad("table.s_min must lie in (0, M)");
  try {
    grid.validate();
  } catch (const Error& e) {
    bad(std::string("grid: ") + e.what());
  }
  if (!(eps > 0.0)) bad("eps must be positive");
  if (!(T > 0.0)) bad("T must be positive");
  for (double x : {grid.lo[0], grid.hi[0]}) {
    for (double y : {grid.lo[1], grid.hi[1]}) {
      const double v = psi.c0 + psi.c1[0] * x + (grid.dim == 2 ? psi.c1[1] * y : 0.0);
      if (!(v > 0.0)) bad("psi must be positive on the boundary");
    }
  }
  if (!(bump.radius > 0.0) || bump.height < 0.0) bad("bump needs radius > 0 and height >= 0");
  if (u_max && !(*u_max > 0.0 && *u_max <= profile.M)) bad("u_max must lie in (0, M]");
  if (eps + bump.height > u_max.value_or(profile.M)) bad("eps + bump.height exceeds u_max");
  if (snapshots.empty() && snapshot_count < 1) bad("snapshots count must be positive");
  for (std::size_t k = 0; k < snapshots.size(); ++k) {
    if (snapshots[k] < 0.0 || snapshots[k] > T) bad("snapshot times must lie in [0, T]");
    if (k > 0 && snapshots[k] <= snapshots[k - 1]) bad("snapshot times must increase");
  }
  if (eps_sweep.size() < 2) bad("eps_sweep needs at least two values");
  for (std::size_t k = 0; k < eps_sweep.size(); ++k) {
    if (!(eps_sweep[k] > 0.0)) bad("eps_sweep values must be positive");
    if (k > 0 && eps_sweep[k] > eps_sweep[k - 1]) bad("eps_sweep must be nonincreasing");
  }
  const auto& L = localization;
  if (!(L.Rp > 0.0 && L.Rp < L.R)) bad("localization needs 0 < Rp < R");
  if (L.n_max < 0 || L.n_max > 30) bad("localization.n_max must lie in [0, 30]");
  if (L.tol_support && !(*L.tol_support > 0.0)) bad("localization.tol_support must be positive");
  for (int a = 0; a < grid.dim; ++a) {
    if (L.x0[a] - L.R < grid.lo[a] || L.x0[a] + L.R > grid.hi[a])
      bad("localization ball B_R(x0) leaves the grid");
  }
  if (exponents.j && !(*exponents.j > 0.0)) bad("exponents.j must be positive");
  if (!(exponents.S > 0.0)) bad("exponents.S must be positive");
  const auto& k = kinetic;
  if (k.tau0 && !(*k.tau0 > 0.0)) bad("kinetic.tau0 must be positive");
  if (!(k.sigma_cells > 0.0)) bad("kinetic.sigma_cells must be positive");
  if (k.a < 0.0) bad("kinetic.a must be nonnegative");
  if (!(k.dt_fraction > 0.0 && k.dt_fraction <= 1.0)) bad("kinetic.dt_fraction must lie in (0, 1]");
  if (!(k.T > 0.0)) bad("kinetic.T must be positive");
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    bad(std::string("invalid JSON: ") + e.what());
  }
  return from_json(j);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

DegeneracyProfile make_profile(const ProfileSpec& spec) {
  DegeneracyProfile p;
  if (spec.kind == "power") {
    p = DegeneracyProfile::power(spec.beta, spec.M);
  } else if (spec.kind == "exp_inv") {
    p = DegeneracyProfile::exp_inv(spec.beta);
  } else if (spec.kind == "exp_zeta_affine") {
    p = DegeneracyProfile::exp_zeta_affine(spec.z0, spec.z1);
  } else if (spec.kind == "exp_zeta_log") {
    p = DegeneracyProfile::exp_zeta_log(spec.z0);
  } else if (spec.kind == "constant") {
    p = DegeneracyProfile::constant(1.0, spec.M);
  } else if (spec.kind == "custom") {
    std::ifstream in(spec.custom_table);
    if (!in) fail(ErrorKind::io, "cannot open profile table " + spec.custom_table);
    std::string line;
    std::getline(in, line);
    if (line.rfind("s,P", 0) != 0) bad("profile table must start with the header s,P");
    std::vector<double> s, v;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream row(line);
      double a = 0.0, b = 0.0;
      char comma = 0;
      if (!(row >> a >> comma >> b) || comma != ',') bad("bad row in profile table: " + line);
      s.push_back(a);
      v.push_back(b);
    }
    p = DegeneracyProfile::custom(std::move(s), std::move(v));
  } else {
    bad("unknown profile kind '" + spec.kind + "'");
  }
  if (spec.c3) p.c3 = *spec.c3;
  return p;
}

LambdaChoice make_lambda(const ExperimentConfig& cfg, const DegeneracyProfile& profile) {
  if (cfg.Lambda) return LambdaChoice::from_Lambda(*cfg.Lambda);
  if (profile.kind == ProfileKind::constant) return LambdaChoice::from_Lambda(1.0);
  return auto_lambda(profile);
}

CoefficientTable make_table(const ExperimentConfig& cfg, const DegeneracyProfile& profile,
                            const LambdaChoice& lam) {
  if (profile.kind == ProfileKind::constant) {
    const double s_min = cfg.table.s_min.value_or(
        std::min(1e-8 * profile.M, 0.5 * cfg.eps * std::min(1.0, cfg.psi.c0)));
    return CoefficientTable::nondegenerate_control(s_min, profile.M, cfg.table.K);
  }
  TableOptions opt;
  opt.K = cfg.table.K;
  opt.quad_tol = cfg.table.quad_tol;
  opt.s_min = cfg.table.s_min.value_or(0.0);
  opt.tail = cfg.table.tail;
  opt.fprime = cfg.table.fprime;
  return CoefficientTable::build(profile, lam, opt);
}

}  // namespace degenstein
