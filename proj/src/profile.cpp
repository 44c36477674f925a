#include "degenstein/profile.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include <math.h>  // boost 1.74 pchip calls isnan unqualified
#include <boost/math/interpolators/pchip.hpp>

#include "degenstein/error.hpp"

namespace degenstein {

std::string_view to_string(ProfileKind kind) noexcept {
  switch (kind) {
    case ProfileKind::power: return "power";
    case ProfileKind::exp_inv: return "exp_inv";
    case ProfileKind::exp_zeta: return "exp_zeta";
    case ProfileKind::custom: return "custom";
    case ProfileKind::constant: return "constant";
  }
  return "unknown";
}

double DegeneracyProfile::derivative(double s) const {
  if (dP) return dP(s);
  constexpr double step = 1e-4;
  const double up = s * std::exp(step);
  const double down = s * std::exp(-step);
  return (P(up) - P(down)) / (up - down);
}

void DegeneracyProfile::validate(double s_floor) const {
  require(static_cast<bool>(P), ErrorKind::domain, "profile has no P");
  require(M > 0.0 && std::isfinite(M), ErrorKind::domain, "profile M must be positive");
  require(c3 > 0.0, ErrorKind::domain, "profile c3 must be positive");
  require(s_floor > 0.0 && s_floor < M, ErrorKind::domain, "validation floor outside (0, M)");

  constexpr int samples = 400;
  const double ratio = std::log(M / s_floor);
  for (int k = 0; k <= samples; ++k) {
    const double s = s_floor * std::exp(ratio * k / samples);
    const double p = P(std::min(s, M));
    if (!(p > 0.0) || p > c3) {
      std::ostringstream msg;
      msg << "profile '" << name << "' violates 0 < P <= c3 at s=" << s << " (P=" << p << ")";
      fail(ErrorKind::domain, msg.str());
    }
  }
  if (kind == ProfileKind::constant) return;

  // P(s_k) -> 0 along s_k = M 2^-k, k up to 200 (s ~ 1e-60 M).
  double last = P(M);
  for (int k = 1; k <= 200; ++k) {
    const double p = P(M * std::ldexp(1.0, -k));
    require(p >= 0.0 && std::isfinite(p), ErrorKind::domain, "profile not finite near 0");
    last = p;
  }
  if (!(last <= 1e-6 * c3)) {
    std::ostringstream msg;
    msg << "profile '" << name << "' does not decay to 0 (P(M 2^-200)=" << last << ")";
    fail(ErrorKind::domain, msg.str());
  }
}

DegeneracyProfile DegeneracyProfile::power(double beta, double M) {
  require(beta > 0.0, ErrorKind::domain, "power profile needs beta > 0");
  require(M > 0.0, ErrorKind::domain, "power profile needs M > 0");
  DegeneracyProfile p;
  p.kind = ProfileKind::power;
  p.name = "power";
  p.param = beta;
  p.M = M;
  p.c3 = std::pow(M, beta);
  p.P = [beta](double s) { return std::pow(s, beta); };
  p.dP = [beta](double s) { return beta * std::pow(s, beta - 1.0); };
  p.integral_closed_form = [beta, M](double s) {
    return (std::pow(s, -beta) - std::pow(M, -beta)) / beta;
  };
  p.natural_tail = std::pow(M, -beta) / beta;
  return p;
}

DegeneracyProfile DegeneracyProfile::exp_inv(double beta) {
  require(beta > 0.0, ErrorKind::domain, "exp_inv profile needs beta > 0");
  DegeneracyProfile p;
  p.kind = ProfileKind::exp_inv;
  p.name = "exp_inv";
  p.param = beta;
  p.M = 1.0;
  p.c3 = 1.0;
  p.P = [beta](double s) { return std::exp(-std::pow(s, -beta)); };
  p.dP = [beta](double s) {
    return beta * std::pow(s, -beta - 1.0) * std::exp(-std::pow(s, -beta));
  };
  return p;
}

DegeneracyProfile DegeneracyProfile::exp_zeta_affine(double z0, double z1) {
  require(z0 > 0.0 && z0 + z1 > 0.0, ErrorKind::domain, "zeta must stay positive on (0, 1]");
  DegeneracyProfile p;
  p.kind = ProfileKind::exp_zeta;
  p.name = "exp_zeta_affine";
  p.param = z0;
  p.M = 1.0;
  p.c3 = std::max(1.0, std::exp(-z1));
  // int_s^1 (z0 + z1 t)/t dt = -z0 ln s + z1 (1 - s)
  p.P = [z0, z1](double s) { return std::pow(s, z0) * std::exp(-z1 * (1.0 - s)); };
  p.dP = [z0, z1](double s) {
    return std::pow(s, z0) * std::exp(-z1 * (1.0 - s)) * (z0 + z1 * s) / s;
  };
  return p;
}

DegeneracyProfile DegeneracyProfile::exp_zeta_log(double z0) {
  require(z0 > 0.0, ErrorKind::domain, "zeta must stay positive on (0, 1]");
  DegeneracyProfile p;
  p.kind = ProfileKind::exp_zeta;
  p.name = "exp_zeta_log";
  p.param = z0;
  p.M = 1.0;
  p.c3 = 1.0;
  // int_s^1 (z0 - ln t)/t dt = -z0 ln s + (ln s)^2 / 2
  p.P = [z0](double s) {
    const double l = std::log(s);
    return std::exp(z0 * l - 0.5 * l * l);
  };
  p.dP = [z0](double s) {
    const double l = std::log(s);
    return std::exp(z0 * l - 0.5 * l * l) * (z0 - l) / s;
  };
  return p;
}

DegeneracyProfile DegeneracyProfile::custom(std::vector<double> s, std::vector<double> values) {
  require(s.size() == values.size() && s.size() >= 4, ErrorKind::domain,
          "custom profile needs >= 4 (s, P) samples");
  for (std::size_t i = 0; i < s.size(); ++i) {
    require(s[i] > 0.0 && values[i] > 0.0, ErrorKind::domain, "custom profile samples must be positive");
    if (i > 0) require(s[i] > s[i - 1], ErrorKind::domain, "custom profile abscissae must increase");
  }
  DegeneracyProfile p;
  p.kind = ProfileKind::custom;
  p.name = "custom";
  p.M = s.back();
  p.c3 = *std::max_element(values.begin(), values.end());

  const double s0 = s[0];
  const double p0 = values[0];
  const double slope = std::log(values[1] / values[0]) / std::log(s[1] / s[0]);
  std::vector<double> ls(s.size()), lp(s.size());
  std::transform(s.begin(), s.end(), ls.begin(), [](double v) { return std::log(v); });
  std::transform(values.begin(), values.end(), lp.begin(), [](double v) { return std::log(v); });
  auto spline = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
      std::move(ls), std::move(lp));
  const double M = p.M;
  p.P = [spline, s0, p0, slope, M](double x) {
    if (x <= s0) return p0 * std::pow(x / s0, slope);
    return std::exp((*spline)(std::log(std::min(x, M))));
  };
  return p;
}

DegeneracyProfile DegeneracyProfile::constant(double value, double M) {
  require(value > 0.0, ErrorKind::domain, "constant profile needs a positive value");
  DegeneracyProfile p;
  p.kind = ProfileKind::constant;
  p.name = "constant";
  p.param = value;
  p.M = M;
  p.c3 = value;
  p.P = [value](double) { return value; };
  p.dP = [](double) { return 0.0; };
  p.integral_closed_form = [value, M](double s) { return std::log(M / s) / value; };
  return p;
}

}  // namespace degenstein
