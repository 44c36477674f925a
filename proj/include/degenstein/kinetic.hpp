#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "degenstein/grid.hpp"
#include "degenstein/parallel.hpp"
#include "degenstein/profile.hpp"

namespace degenstein {

enum class KernelShape { gaussian_truncated, triangular };

/// Waiting time tau(u) and jump variance sigma^2(u) = scale tau(u) P(u) per
/// axis (diagonal covariance). With scale = 2 the gather step's diffusive
/// limit is u_t = P(u) lap u.
struct JumpModel {
  std::function<double(double)> tau;
  std::function<double(double)> P;
  double variance_scale = 2.0;
  KernelShape shape = KernelShape::gaussian_truncated;

  /// tau = tau0 u^-a, P = u^beta.
  static JumpModel power_law(double beta, double tau0, double a,
                             KernelShape shape = KernelShape::gaussian_truncated);
  /// tau = tau0 u^-a with an arbitrary profile.
  static JumpModel from_profile(const DegeneracyProfile& profile, double tau0, double a,
                                KernelShape shape = KernelShape::gaussian_truncated);

  double sigma2(double u) const { return variance_scale * tau(u) * P(u); }
  /// Radius of J(tau): 4 sigma (gaussian) or sqrt(6) sigma (triangular, per axis).
  double support_radius(double u) const;
};

/// Jump kernel sampled on the grid's integer offsets and renormalized.
class DiscreteKernel {
 public:
  DiscreteKernel(KernelShape shape, double sigma, const GridSpec& grid);

  /// Normalized weight of offset (k0, k1); k1 ignored in 1D.
  double weight(int k0, int k1 = 0) const;
  /// No offset other than 0 inside the support: the jump is the identity.
  bool identity() const { return reach_[0] == 0 && reach_[1] == 0; }
  int reach(int axis) const { return reach_[axis]; }
  double sigma() const { return sigma_; }

 private:
  double raw(int k0, int k1) const;

  KernelShape shape_;
  double sigma_;
  int dim_;
  std::array<double, 2> h_;
  std::array<int, 2> reach_{0, 0};
  double radius_ = 0.0;
  double norm_ = 1.0;
  // separable per-axis factors, offset k stored at k + reach
  std::array<std::vector<double>, 2> axis_;
};

struct KernelMoments {
  double mass = 0.0;
  double mean = 0.0;
  double variance = 0.0;  // along axis 0
};

/// Moments of the discretized kernel at concentration u. Resolution error
/// when sigma(u) < h.
KernelMoments kernel_moments(const JumpModel& model, double u, const GridSpec& grid);

/// Absorption rate m(x, u) <= 0.
struct SinkTerm {
  std::function<double(const std::array<double, 2>&, double)> m;

  static SinkTerm none();
  static SinkTerm linear(double rate);  // m = -rate u
  bool active() const { return static_cast<bool>(m); }
};

/// gather: u_new(x) = (1 - f(x)) u(x) + f(x) sum_k w_x(k) u(x + k), the axiom
/// read at the target with its own waiting time; limit u_t = P lap u.
/// scatter: a fraction f(x) of cell x's mass leaves by w_x; mass conserving,
/// limit u_t = lap(P u) . Both use f = dt / tau(u) and reflecting walls.
enum class MasterForm { gather, scatter };

/// One synchronous step, then u <- max(0, u + dt m). Step error when dt
/// exceeds min tau over occupied cells, negativity error if u < 0 appears.
Field master_step(const Field& density, const GridSpec& grid, const JumpModel& model,
                  const SinkTerm& sink, double dt, MasterForm form = MasterForm::gather,
                  Exec exec = Exec::parallel);

/// Shortest waiting time over cells with u > 0 (infinity when empty).
double min_waiting_time(const JumpModel& model, std::span<const double> u);

struct KineticRun {
  std::vector<double> final_field;
  std::vector<double> mass_history;
  std::size_t steps = 0;
  double dt = 0.0;
};

/// Steps with the fixed dt = dt_fraction * min tau(initial field), shortened
/// at the end to land on T.
KineticRun run_kinetic(std::vector<double> initial, const GridSpec& grid, const JumpModel& model,
                       const SinkTerm& sink, double T, double dt_fraction,
                       MasterForm form = MasterForm::gather, Exec exec = Exec::parallel);

double total_mass(const GridSpec& grid, std::span<const double> u);

}  // namespace degenstein
