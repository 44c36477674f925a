#include "degenstein/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "degenstein/error.hpp"

namespace degenstein {

namespace {

using boost::math::quadrature::gauss_kronrod;

constexpr unsigned kMaxDepth = 20;

// int_a^b f(e^t) dt where the caller has already folded the Jacobian in.
template <class F>
double log_quad(F&& f, double log_a, double log_b, double tol) {
  if (log_a == log_b) return 0.0;
  double err = 0.0;
  const double value = gauss_kronrod<double, 15>::integrate(f, log_a, log_b, kMaxDepth, tol, &err);
  if (!std::isfinite(value) || !std::isfinite(err)) {
    std::ostringstream msg;
    msg << "quadrature did not converge on [" << std::exp(log_a) << ", " << std::exp(log_b) << "]";
    fail(ErrorKind::divergence, msg.str());
  }
  return value;
}

// int_{s}^{t} dsigma / (sigma P(sigma)) = int_{ln s}^{ln t} dx / P(e^x)
double reciprocal_integral(const DegeneracyProfile& profile, double s, double t, double tol) {
  return log_quad([&](double x) { return 1.0 / profile.P(std::exp(x)); }, std::log(s),
                  std::log(t), tol);
}

// F'(s) = B1 s^-2 I^(-1/Lambda - 2) P^-1 ((Lambda+1)/Lambda - P I), B1 = Lambda^(-1/Lambda - 1)
double fprime_from_identity(double s, double I, double P, const LambdaChoice& lam) {
  const double L = lam.Lambda;
  const double gap = lam.critical_ratio() - P * I;
  if (!(gap > 0.0)) return gap <= 0.0 ? -1.0 : std::numeric_limits<double>::quiet_NaN();
  const double log_value = (-1.0 / L - 1.0) * std::log(L) - 2.0 * std::log(s) +
                           (-1.0 / L - 2.0) * std::log(I) - std::log(P) + std::log(gap);
  return std::exp(log_value);
}

std::vector<double> log_grid(double s_min, double M, std::size_t K) {
  std::vector<double> nodes(K);
  const double span = std::log(M / s_min);
  for (std::size_t i = 0; i < K; ++i) {
    nodes[i] = s_min * std::exp(span * static_cast<double>(i) / static_cast<double>(K - 1));
  }
  nodes.front() = s_min;
  nodes.back() = M;
  return nodes;
}

}  // namespace

std::string_view to_string(Column c) noexcept {
  switch (c) {
    case Column::I: return "I";
    case Column::H: return "H";
    case Column::h: return "h";
    case Column::F: return "F";
    case Column::Fprime: return "Fprime";
    case Column::G: return "G";
  }
  return "?";
}

LambdaChoice LambdaChoice::from_Lambda(double Lambda) {
  require(Lambda > 0.0 && std::isfinite(Lambda), ErrorKind::domain, "Lambda must be positive");
  return LambdaChoice{Lambda, 2.0 / (Lambda + 1.0)};
}

LambdaChoice LambdaChoice::from_lambda(double lambda) {
  require(lambda > 0.0 && lambda < 2.0, ErrorKind::domain, "lambda must lie in (0, 2)");
  return LambdaChoice{2.0 / lambda - 1.0, lambda};
}

LambdaChoice LambdaChoice::automatic(double A_est, double margin) {
  require(A_est > 0.0 && std::isfinite(A_est), ErrorKind::assumption,
          "automatic Lambda needs a finite positive estimate of sup P I");
  const double target = A_est * (1.0 + margin);
  if (target > 2.0) return from_Lambda(1.0 / (target - 1.0));
  return from_Lambda(1.0);
}

double default_tail(const DegeneracyProfile& profile, const LambdaChoice& lam) {
  if (profile.natural_tail) return *profile.natural_tail;
  return 1.0 / lam.Lambda;
}

double default_s_min(const DegeneracyProfile& profile, const LambdaChoice& lam) {
  const double floor = 1e-8 * profile.M;
  const double log_p_floor = -250.0 * std::log(10.0) / (1.0 / lam.Lambda + 2.0);
  auto ok = [&](double s) {
    const double p = profile.P(s);
    return p > 0.0 && std::log(p) >= log_p_floor;
  };
  if (ok(floor)) return floor;
  // bisection in log s for the smallest representable node
  double lo = std::log(floor);
  double hi = std::log(profile.M);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ok(std::exp(mid))) hi = mid; else lo = mid;
  }
  return std::exp(hi);
}

double integral_I(const DegeneracyProfile& profile, double s, double tail, double quad_tol) {
  require(s > 0.0 && std::isfinite(s), ErrorKind::domain, "integral_I needs s > 0");
  if (s >= profile.M) return tail;
  const double value = reciprocal_integral(profile, s, profile.M, quad_tol);
  return value + tail;
}

CoefficientTable CoefficientTable::build(const DegeneracyProfile& profile, const LambdaChoice& lam,
                                         const TableOptions& options) {
  const double M = profile.M;
  const double s_min = options.s_min > 0.0 ? options.s_min : default_s_min(profile, lam);
  require(s_min > 0.0 && s_min < M, ErrorKind::domain, "table needs 0 < s_min < M");
  require(options.K >= 16, ErrorKind::domain, "table needs K >= 16 nodes");
  require(options.quad_tol > 0.0, ErrorKind::domain, "quad_tol must be positive");

  CoefficientTable t;
  t.lam_ = lam;
  t.quad_tol_ = options.quad_tol;
  t.tail_ = options.tail ? *options.tail : default_tail(profile, lam);
  t.nodes_ = log_grid(s_min, M, options.K);
  const auto& s = t.nodes_;
  const std::size_t K = s.size();
  for (auto& col : t.values_) col.assign(K, 0.0);
  auto& I = t.values_[static_cast<std::size_t>(Column::I)];
  auto& H = t.values_[static_cast<std::size_t>(Column::H)];
  auto& h = t.values_[static_cast<std::size_t>(Column::h)];
  auto& F = t.values_[static_cast<std::size_t>(Column::F)];
  auto& Fp = t.values_[static_cast<std::size_t>(Column::Fprime)];
  auto& G = t.values_[static_cast<std::size_t>(Column::G)];
  const double L = lam.Lambda;

  // I accumulated from M downwards, one quadrature per log-grid cell.
  I[K - 1] = t.tail_;
  for (std::size_t i = K - 1; i-- > 0;) {
    I[i] = I[i + 1] + reciprocal_integral(profile, s[i], s[i + 1], options.quad_tol);
  }

  for (std::size_t i = 0; i < K; ++i) {
    const double p = profile.P(s[i]);
    H[i] = std::exp(-std::log(L * I[i]) / L);
    F[i] = std::exp((L + 1.0) * std::log(H[i]) - std::log(s[i]));
    h[i] = std::exp(std::log(F[i]) - std::log(p));
    if (!(H[i] > 0.0 && F[i] > 0.0 && h[i] > 0.0 && std::isfinite(h[i]))) {
      std::ostringstream msg;
      msg << "coefficients not representable at s=" << s[i] << "; raise s_min";
      fail(ErrorKind::divergence, msg.str());
    }
  }

  // I at an arbitrary point of cell [s_i, s_{i+1}]
  auto I_at = [&](double x, std::size_t cell) {
    if (profile.has_closed_form_integral()) return profile.integral_closed_form(x) + t.tail_;
    return I[cell + 1] + reciprocal_integral(profile, x, s[cell + 1], options.quad_tol);
  };

  std::optional<Spline> sqrt_fp_spline;
  if (options.fprime == FprimeMethod::closed_form) {
    for (std::size_t i = 0; i < K; ++i) {
      const double Ii = profile.has_closed_form_integral()
                            ? profile.integral_closed_form(s[i]) + t.tail_
                            : I[i];
      Fp[i] = fprime_from_identity(s[i], Ii, profile.P(s[i]), lam);
    }
  } else {
    const double dx = std::log(s[1] / s[0]);
    for (std::size_t i = 0; i < K; ++i) {
      double dFdx;
      if (i == 0) {
        dFdx = (-3.0 * F[0] + 4.0 * F[1] - F[2]) / (2.0 * dx);
      } else if (i == K - 1) {
        dFdx = (3.0 * F[K - 1] - 4.0 * F[K - 2] + F[K - 3]) / (2.0 * dx);
      } else {
        dFdx = (F[i + 1] - F[i - 1]) / (2.0 * dx);
      }
      Fp[i] = dFdx / s[i];
    }
  }
  for (std::size_t i = 0; i < K; ++i) {
    if (!(Fp[i] > 0.0)) {
      std::ostringstream msg;
      msg << "F' <= 0 at s=" << s[i] << " (P I = " << profile.P(s[i]) * I[i]
          << ", (Lambda+1)/Lambda = " << lam.critical_ratio() << ")";
      fail(ErrorKind::assumption, msg.str());
    }
  }
  if (options.fprime == FprimeMethod::central_difference) {
    std::vector<double> lx(K), ly(K);
    for (std::size_t i = 0; i < K; ++i) {
      lx[i] = std::log(s[i]);
      ly[i] = 0.5 * std::log(Fp[i]);
    }
    sqrt_fp_spline.emplace(std::move(lx), std::move(ly));
  }

  auto sqrt_fprime = [&](double x, std::size_t cell) {
    if (sqrt_fp_spline) return std::exp((*sqrt_fp_spline)(std::log(x)));
    const double fp = fprime_from_identity(x, I_at(x, cell), profile.P(x), lam);
    if (!(fp > 0.0)) fail(ErrorKind::assumption, "F' <= 0 between table nodes");
    return std::sqrt(fp);
  };

  // [0, s_0]: F' extended by the local power law F ~ s^p, whose integral in
  // t = r^2 is closed form: G(s_0) = 2 sqrt(p F s_0) / (p + 1).
  const double p0 = s[0] * Fp[0] / F[0];
  G[0] = 2.0 * std::sqrt(p0 * F[0] * s[0]) / (p0 + 1.0);
  for (std::size_t i = 0; i + 1 < K; ++i) {
    const double piece = log_quad(
        [&](double x) {
          const double sigma = std::exp(x);
          return sqrt_fprime(sigma, i) * sigma;
        },
        std::log(s[i]), std::log(s[i + 1]), options.quad_tol);
    G[i + 1] = G[i] + piece;
  }

  t.finalize();
  return t;
}

CoefficientTable CoefficientTable::nondegenerate_control(double s_min, double M, std::size_t K) {
  require(s_min > 0.0 && s_min < M, ErrorKind::domain, "control table needs 0 < s_min < M");
  require(K >= 16, ErrorKind::domain, "control table needs K >= 16");
  CoefficientTable t;
  t.lam_ = LambdaChoice::from_Lambda(1.0);
  t.control_ = true;
  t.nodes_ = log_grid(s_min, M, K);
  for (auto& col : t.values_) col.assign(K, 0.0);
  for (std::size_t i = 0; i < K; ++i) {
    const double s = t.nodes_[i];
    t.values_[static_cast<std::size_t>(Column::I)][i] = 1.0 / s;
    t.values_[static_cast<std::size_t>(Column::H)][i] = s;
    t.values_[static_cast<std::size_t>(Column::h)][i] = 1.0;
    t.values_[static_cast<std::size_t>(Column::F)][i] = 1.0;
    t.values_[static_cast<std::size_t>(Column::Fprime)][i] = 0.0;
    t.values_[static_cast<std::size_t>(Column::G)][i] = s;
  }
  t.tail_ = 1.0 / M;
  t.finalize();
  return t;
}

void CoefficientTable::finalize() {
  splines_.clear();
  splines_.reserve(column_count);
  std::vector<double> lx(nodes_.size());
  std::transform(nodes_.begin(), nodes_.end(), lx.begin(), [](double v) { return std::log(v); });
  for (std::size_t c = 0; c < column_count; ++c) {
    const auto& col = values_[c];
    const bool positive = std::all_of(col.begin(), col.end(), [](double v) { return v > 0.0; });
    log_values_[c] = positive;
    std::vector<double> x = lx;
    std::vector<double> y(col.size());
    if (positive) {
      std::transform(col.begin(), col.end(), y.begin(), [](double v) { return std::log(v); });
    } else {
      y = col;
    }
    splines_.emplace_back(Spline(std::move(x), std::move(y)));
  }
}

double CoefficientTable::eval(Column column, double s) const {
  const double lo = s_min();
  const double hi = M();
  constexpr double slack = 1e-12;
  if (!(s >= lo * (1.0 - slack) && s <= hi * (1.0 + slack))) {
    std::ostringstream msg;
    msg << "eval(" << to_string(column) << ") at s=" << s << " outside [" << lo << ", " << hi << "]";
    fail(ErrorKind::domain, msg.str());
  }
  return eval_clamped(column, s);
}

double CoefficientTable::eval_clamped(Column column, double s) const {
  const auto c = static_cast<std::size_t>(column);
  const auto& col = values_[c];
  if (!(s > nodes_.front())) return col.front();
  if (!(s < nodes_.back())) return col.back();
  const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), s);
  if (*it == s) return col[static_cast<std::size_t>(it - nodes_.begin())];
  const double y = (*splines_[c])(std::log(s));
  return log_values_[c] ? std::exp(y) : y;
}

TableInvariants CoefficientTable::invariants(const DegeneracyProfile& profile) const {
  TableInvariants inv;
  const auto& I = values_[static_cast<std::size_t>(Column::I)];
  const auto& H = values_[static_cast<std::size_t>(Column::H)];
  const auto& h = values_[static_cast<std::size_t>(Column::h)];
  const auto& F = values_[static_cast<std::size_t>(Column::F)];
  const auto& G = values_[static_cast<std::size_t>(Column::G)];
  const double L = lam_.Lambda;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const double s = nodes_[i];
    const double HL = std::pow(H[i], L + 1.0);
    inv.sF_vs_H = std::max(inv.sF_vs_H, std::abs(s * F[i] / HL - 1.0));
    inv.hsP_vs_H = std::max(inv.hsP_vs_H, std::abs(h[i] * s * profile.P(s) / HL - 1.0));
    inv.sF_pow_vs_H =
        std::max(inv.sF_pow_vs_H, std::abs(std::pow(s * F[i], 0.5 * lam_.lambda) / H[i] - 1.0));
    inv.G_over_sqrt_sF = std::max(inv.G_over_sqrt_sF, G[i] / std::sqrt(s * F[i]));
    if (i > 0) {
      inv.monotone_H = inv.monotone_H && H[i] >= H[i - 1];
      inv.monotone_F = inv.monotone_F && F[i] >= F[i - 1];
      inv.monotone_G = inv.monotone_G && G[i] >= G[i - 1];
      inv.nonincreasing_I = inv.nonincreasing_I && I[i] <= I[i - 1];
    }
  }
  return inv;
}

void CoefficientTable::write_csv(std::ostream& out) const {
  out << "s,I,H,h,F,Fprime,G\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    out << nodes_[i];
    for (const auto& col : values_) out << ',' << col[i];
    out << '\n';
  }
}

CoefficientTable CoefficientTable::from_csv(std::istream& in, const LambdaChoice& lam,
                                            double quad_tol) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::io, "empty table CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "s,I,H,h,F,Fprime,G", ErrorKind::io, "unexpected table CSV header: " + line);
  CoefficientTable t;
  t.lam_ = lam;
  t.quad_tol_ = quad_tol;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::array<double, column_count + 1> v{};
    for (std::size_t k = 0; k < v.size(); ++k) {
      require(static_cast<bool>(std::getline(row, cell, ',')), ErrorKind::io,
              "short row in table CSV: " + line);
      v[k] = std::stod(cell);
    }
    require(t.nodes_.empty() || v[0] > t.nodes_.back(), ErrorKind::io,
            "table CSV nodes must increase");
    t.nodes_.push_back(v[0]);
    for (std::size_t c = 0; c < column_count; ++c) t.values_[c].push_back(v[c + 1]);
  }
  require(t.nodes_.size() >= 16, ErrorKind::io, "table CSV needs >= 16 rows");
  t.tail_ = t.values_[static_cast<std::size_t>(Column::I)].back();
  const auto& fp = t.values_[static_cast<std::size_t>(Column::Fprime)];
  t.control_ = std::all_of(fp.begin(), fp.end(), [](double v) { return v == 0.0; });
  t.finalize();
  return t;
}

}  // namespace degenstein
