#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace degenstein {

enum class ProfileKind { power, exp_inv, exp_zeta, custom, constant };

std::string_view to_string(ProfileKind kind) noexcept;

/// The degeneracy profile P = sigma^2 / tau on (0, M]: the single physical
/// input from which every coefficient is derived.
///
/// `integral_closed_form`, when present, returns the exact value of
/// int_s^M dsigma / (sigma P(sigma)). `natural_tail`, when present, is the
/// exact int_M^inf of the same integrand (profiles that extend past M).
struct DegeneracyProfile {
  ProfileKind kind = ProfileKind::custom;
  std::string name;
  double param = 0.0;  // beta for power / exp_inv, zeta(0) for exp_zeta
  double M = 1.0;
  double c3 = 1.0;
  std::function<double(double)> P;
  std::function<double(double)> dP;  // optional closed-form P'
  std::function<double(double)> integral_closed_form;
  std::optional<double> natural_tail;

  double operator()(double s) const { return P(s); }

  /// P'(s); the registered closed form if any, else a central difference
  /// in log s.
  double derivative(double s) const;

  bool has_closed_form_integral() const { return static_cast<bool>(integral_closed_form); }

  /// Throws domain errors when P is not positive and bounded by c3 on
  /// [s_floor, M], or when P(s) does not decay to 0 along s_k = M 2^-k.
  /// The nondegenerate control (kind == constant) skips the decay check.
  void validate(double s_floor) const;

  static DegeneracyProfile power(double beta, double M = 1.0);
  /// P(s) = exp(-1/s^beta), on (0, 1].
  static DegeneracyProfile exp_inv(double beta);
  /// P(s) = exp(-int_s^1 zeta(t)/t dt) with zeta(t) = z0 + z1 t (bounded zeta).
  static DegeneracyProfile exp_zeta_affine(double z0, double z1);
  /// Same family with zeta(t) = z0 - ln t, unbounded as t -> 0.
  static DegeneracyProfile exp_zeta_log(double z0);
  /// Tabulated P, monotone log-log interpolation, power-law extension below
  /// the first sample. M is the last abscissa.
  static DegeneracyProfile custom(std::vector<double> s, std::vector<double> p);
  /// P == value. Violates P(0) = 0; used only as the nondegenerate control.
  static DegeneracyProfile constant(double value, double M = 1.0);
};

}  // namespace degenstein
