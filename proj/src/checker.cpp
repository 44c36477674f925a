#include "degenstein/checker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "degenstein/error.hpp"

namespace degenstein {

namespace {

constexpr int kTrendPoints = 8;

double near(double measured, double expected, double margin) {
  const double scale = expected == 0.0 ? 1.0 : std::abs(expected);
  return std::abs(measured - expected) / scale - margin;  // <= 0 means within margin
}

}  // namespace

A1Result check_A1(std::span<const double> s, std::span<const double> F,
                  std::span<const double> G, std::span<const double> Fprime) {
  const std::size_t n = s.size();
  require(n > 0 && F.size() == n && G.size() == n && Fprime.size() == n, ErrorKind::domain,
          "check_A1: column lengths differ");
  A1Result out;
  out.ratios.assign(n, std::numeric_limits<double>::quiet_NaN());
  std::size_t first = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (G[i] <= 0.0) {
      require(i == 0 && n > 1, ErrorKind::degenerate,
              "G vanishes beyond the first node; A-1 ratio undefined");
      first = 1;
      continue;
    }
    out.ratios[i] = F[i] / (G[i] * std::sqrt(Fprime[i]));
  }
  bool finite = true;
  out.C1_est = 0.0;
  for (std::size_t i = first; i < n; ++i) {
    if (!std::isfinite(out.ratios[i])) finite = false;
    else out.C1_est = std::max(out.C1_est, out.ratios[i]);
  }
  bool bounded_trend = true;
  const std::size_t last = std::min(n, first + kTrendPoints);
  for (std::size_t i = first; i + 1 < last; ++i) {
    if (out.ratios[i] > 2.0 * out.ratios[i + 1]) bounded_trend = false;
  }
  out.pass = finite && bounded_trend;
  out.small_s_ratio = out.ratios[first];
  return out;
}

A1Result check_A1(const CoefficientTable& table) {
  auto out = check_A1(table.nodes(), table.column(Column::F), table.column(Column::G),
                      table.column(Column::Fprime));
  const auto samples = geometric_samples(table.s_min(), table.M());
  std::vector<double> y;
  for (double s : samples) {
    y.push_back(table.eval(Column::F, s) /
                (table.eval(Column::G, s) * std::sqrt(table.eval(Column::Fprime, s))));
  }
  out.small_s_ratio = extrapolate_to_zero(samples, y, table.M());
  return out;
}

std::vector<double> geometric_samples(double s_min, double M, int count) {
  // stay well inside the asymptotic regime: s <= M / 16 while that leaves
  // at least three points, else up to M
  std::vector<double> s;
  for (double cap : {M / 16.0, M}) {
    s.clear();
    for (int k = 0; k < count; ++k) {
      const double v = std::ldexp(s_min, k);
      if (v > cap) break;
      s.push_back(v);
    }
    if (s.size() >= 3) break;
  }
  if (s.empty()) s.push_back(s_min);
  return s;
}

namespace {

struct LineFit {
  double intercept = 0.0;
  double rss = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  const double denom = n * sxx - sx * sx;
  LineFit f;
  double slope = 0.0;
  if (std::abs(denom) > 0.0) slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - slope * sx) / n;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = y[k] - f.intercept - slope * x[k];
    f.rss += r * r;
  }
  return f;
}

}  // namespace

double extrapolate_to_zero(std::span<const double> s, std::span<const double> y, double M) {
  require(s.size() == y.size() && !s.empty(), ErrorKind::domain, "extrapolate: bad samples");
  if (s.size() == 1) return y[0];
  std::vector<double> algebraic(s.size()), logarithmic(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    algebraic[k] = s[k] / M;
    logarithmic[k] = 1.0 / std::log(M / s[k]);
  }
  const auto a = fit_line(algebraic, y);
  const auto l = fit_line(logarithmic, y);
  return a.rss <= l.rss ? a.intercept : l.intercept;
}

ABEstimate estimate_A_B(const DegeneracyProfile& profile, const LambdaChoice& lam,
                        const CoefficientTable& table, double margin) {
  ABEstimate out;
  const auto s = table.nodes();
  const auto I = table.column(Column::I);
  for (std::size_t i = 0; i < s.size(); ++i) out.A_est = std::max(out.A_est, profile(s[i]) * I[i]);

  const auto samples = geometric_samples(table.s_min(), table.M());
  std::vector<double> y;
  for (double v : samples) y.push_back(profile(v) * table.eval(Column::I, v));
  // P I > 0, and the sampled sup dominates the trend
  out.B_est = std::clamp(extrapolate_to_zero(samples, y, table.M()), 0.0, out.A_est);

  out.critical_ratio = lam.critical_ratio();
  out.P2_pass = out.critical_ratio > out.A_est * (1.0 + margin);
  return out;
}

double almost_decreasing_constant(std::span<const double> Q) {
  if (Q.size() < 2) return 1.0;
  double c = std::numeric_limits<double>::infinity();
  double suffix_max = Q.back();
  for (std::size_t i = Q.size() - 1; i-- > 0;) {
    c = std::min(c, Q[i] / suffix_max);
    suffix_max = std::max(suffix_max, Q[i]);
  }
  return c;
}

AlmostDecreasing check_almost_decreasing(const DegeneracyProfile& profile,
                                         const CoefficientTable& table,
                                         std::optional<double> mu, double c_floor) {
  AlmostDecreasing out;
  const auto s = table.nodes();
  const auto I = table.column(Column::I);
  for (std::size_t i = 0; i < s.size(); ++i) {
    out.sPprimeI_sup = std::max(out.sPprimeI_sup, s[i] * profile.derivative(s[i]) * I[i]);
  }
  const auto samples = geometric_samples(table.s_min(), table.M());
  std::vector<double> y;
  for (double v : samples) y.push_back(v * profile.derivative(v) * table.eval(Column::I, v));
  out.sPprimeI_limit = extrapolate_to_zero(samples, y, table.M());

  if (mu) {
    require(*mu > 0.0, ErrorKind::domain, "almost-decreasing test needs mu > 0");
    out.mu = *mu;
  } else {
    out.mu = out.sPprimeI_sup > 0.0 ? out.sPprimeI_sup : 1.0;
  }
  // compare in logs: I^mu overflows for the steeper profiles
  std::vector<double> logQ(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    logQ[i] = std::log(profile(s[i])) + out.mu * std::log(I[i]);
  }
  double worst = 0.0;
  double suffix_max = logQ.back();
  for (std::size_t i = logQ.size() - 1; i-- > 0;) {
    worst = std::min(worst, logQ[i] - suffix_max);
    suffix_max = std::max(suffix_max, logQ[i]);
  }
  // a nonincreasing Q gives c >= 1; report the best constant capped at 1
  out.c = std::exp(worst);
  out.pass = out.c >= c_floor;
  return out;
}

bool AssumptionReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

const Verdict& AssumptionReport::verdict(const std::string& name) const {
  for (const auto& v : verdicts) {
    if (v.name == name) return v;
  }
  fail(ErrorKind::domain, "no verdict named " + name);
}

AssumptionReport check_assumptions(const DegeneracyProfile& profile, const LambdaChoice& lam,
                                   const CoefficientTable& table, const CheckOptions& options) {
  AssumptionReport r;
  r.profile = profile.name;
  r.Lambda = lam.Lambda;

  const auto a1 = check_A1(table);
  r.C1_est = a1.C1_est;
  r.C1_small_s = a1.small_s_ratio;

  const auto inv = table.invariants(profile);
  r.C2_residual = inv.sF_pow_vs_H;

  const auto ab = estimate_A_B(profile, lam, table, options.margin);
  r.A_est = ab.A_est;
  r.B_est = ab.B_est;

  const auto ad = check_almost_decreasing(profile, table, options.mu, options.c_floor);
  r.mu_used = ad.mu;
  r.almost_dec_c = ad.c;
  r.sPprimeI_sup = ad.sPprimeI_sup;
  r.sPprimeI_limit = ad.sPprimeI_limit;

  std::ostringstream d;
  d << "C1 = " << a1.C1_est;
  r.verdicts.push_back({"A1", a1.pass, a1.C1_est, d.str()});

  const double c2_tol = 10.0 * table.quad_tol();
  r.verdicts.push_back({"A2", r.C2_residual <= c2_tol, c2_tol - r.C2_residual, "C2 = 1"});

  r.verdicts.push_back({"P2_sup", ab.P2_pass, ab.critical_ratio - ab.A_est,
                        "(Lambda+1)/Lambda against sup P I"});
  r.verdicts.push_back({"P2_limit", ab.critical_ratio > ab.B_est * (1.0 + options.margin),
                        ab.critical_ratio - ab.B_est, "(Lambda+1)/Lambda against lim P I"});
  r.verdicts.push_back({"almost_decreasing", ad.pass, ad.c - options.c_floor,
                        "P I^mu, mu = sup s P' I"});
  const bool finite_limits = std::isfinite(ab.B_est) && std::isfinite(ad.sPprimeI_sup) &&
                             std::isfinite(ad.sPprimeI_limit);
  r.verdicts.push_back({"P_test", finite_limits, 0.0, "limsup P I and s P' I finite"});
  return r;
}

LambdaChoice auto_lambda(const DegeneracyProfile& profile, double margin) {
  const double tail = profile.natural_tail.value_or(1.0);
  const double s_floor = default_s_min(profile, LambdaChoice::from_Lambda(1.0));
  double A = 0.0;
  constexpr int kPoints = 64;
  for (int k = 0; k < kPoints; ++k) {
    const double s = s_floor * std::pow(profile.M / s_floor, k / double(kPoints - 1));
    A = std::max(A, profile(s) * integral_I(profile, s, tail));
  }
  return LambdaChoice::automatic(A, margin);
}

std::vector<CatalogEntry> example_catalog() {
  const auto one = LambdaChoice::from_Lambda(1.0);
  return {
      {DegeneracyProfile::power(1.0), one, 1.0, 1.0, 1.0},
      {DegeneracyProfile::exp_inv(1.0), one, std::nullopt, 0.0, 1.0},
      {DegeneracyProfile::exp_zeta_affine(1.0, 0.5), one, std::nullopt, 1.0, 1.0},
      {DegeneracyProfile::exp_zeta_log(1.0), one, std::nullopt, 0.0, 1.0},
  };
}

bool matches_expectation(const AssumptionReport& report, const CatalogEntry& entry,
                         double margin) {
  if (entry.expected_A && near(report.A_est, *entry.expected_A, margin) > 0.0) return false;
  if (near(report.B_est, entry.expected_B, margin) > 0.0) return false;
  if (near(report.sPprimeI_limit, entry.expected_sPprimeI_limit, margin) > 0.0) return false;
  return report.all_pass();
}

}  // namespace degenstein
