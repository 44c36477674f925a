#pragma once

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "degenstein/coeffs.hpp"
#include "degenstein/grid.hpp"
#include "degenstein/solver.hpp"

namespace degenstein {

/// Shrinking balls B_n = B_{R_n}(x0), R_n = R (b - 2 + b^-n) / (b - 1), with
/// b fixed by (b - 2) / (b - 1) = R' / R so that R_n -> R'.
struct CutoffFamily {
  std::array<double, 2> x0{0.0, 0.0};
  double R = 1.0;
  double Rp = 0.5;
  double b = 3.0;
  int dim = 1;

  static CutoffFamily make(std::array<double, 2> x0, double R, double Rp, int dim);

  double radius(int n) const;
  double distance(const std::array<double, 2>& x) const;
  /// 1 on B_{n+1}, 0 outside B_n, linear in between.
  double theta(int n, const std::array<double, 2>& x) const;
  /// b^(n+1) / R, the exact slope of theta_n.
  double lipschitz(int n) const;
  /// Geometry error unless B_R(x0) lies inside the grid box.
  void check_inside(const GridSpec& grid) const;
};

struct ExponentPack {
  int N = 1;
  double j = 2.0;
  double lambda = 1.0;
  double Lambda = 1.0;
  double k = 0.2;
  double beta = 1.0;
  double S = 1.0;
  double C1 = 1.0;
  double C2 = 1.0;
  double D = 1.0;

  /// j defaults to 2 for N <= 2 and 2 / (N - 2) otherwise.
  static ExponentPack make(int N, const LambdaChoice& lam, double C1, const CutoffFamily& cutoffs,
                           std::optional<double> j = std::nullopt, double S = 1.0);

  double delta() const { return k * j; }
  /// Largest Y_0 that the iteration drives to zero: D^(-1/(kj)) b^(-2/(kj)^2).
  double threshold(double b) const;
};

/// Closed-form bound of the recursion y_{n+1} <= c b^n y_n^(1+delta).
double lady_bound(double c, double b, double delta, double y0, int n);
/// c^(-1/delta) b^(-1/delta^2).
double lady_threshold(double c, double b, double delta);

/// Per-snapshot integrals behind Y_n: S_n(t_k) = int theta_n^2 H(u) and
/// Q_n(t_k) = int |grad(theta_n G(u))|^2 (centered differences of the product).
struct EnergySamples {
  std::vector<double> times;
  std::vector<std::vector<double>> S;  // [n][k]
  std::vector<std::vector<double>> Q;  // [n][k]
};

EnergySamples energy_samples(const SolveTrace& trace, const GridSpec& grid,
                             const CutoffFamily& cutoffs, const CoefficientTable& table, int n_max);

/// Y_n[T'] = T'^beta (sup_{t <= T'} S_n + int_0^T' Q_n dt); sup over stored
/// snapshots plus the value interpolated at T', time integral by trapezoids
/// on the piecewise-linear interpolant.
double energy_Y(const EnergySamples& samples, const ExponentPack& pack, int n, double T_prime);
double energy_Y(const SolveTrace& trace, const GridSpec& grid, const CutoffFamily& cutoffs,
                const ExponentPack& pack, const CoefficientTable& table, int n, double T_prime);

/// Largest T' in (0, T] with Y_0[T'] <= threshold, by bisection; 0 if none.
double estimate_T_prime(const EnergySamples& samples, const ExponentPack& pack, double b);
double estimate_T_prime(const SolveTrace& trace, const GridSpec& grid, const CutoffFamily& cutoffs,
                        const ExponentPack& pack, const CoefficientTable& table);

struct DeGiorgiTrace {
  double T_prime = 0.0;        // estimate_T_prime
  double T_eval = 0.0;         // time at which Y_n were measured
  std::vector<double> Y;       // Y_0 .. Y_nmax at T_eval
  std::vector<double> bound;   // bound[n] = D b^(2(n-1)) Y_{n-1}^(1+kj), bound[0] = Y_0
  double threshold = 0.0;
  double slack = 2.0;
  bool inequality_holds = false;  // Y_n <= slack * bound[n], n >= 1
  bool nonincreasing = false;     // Y_n <= Y_{n-1}, n >= 2
  bool below_threshold = false;   // Y_0[T_eval] <= threshold
};

/// Measures Y_0..Y_nmax at T_eval (defaults to the trace's final time).
DeGiorgiTrace de_giorgi(const SolveTrace& trace, const GridSpec& grid, const CutoffFamily& cutoffs,
                        const ExponentPack& pack, const CoefficientTable& table, int n_max = 6,
                        std::optional<double> T_eval = std::nullopt, double slack = 2.0);

struct FrontRadius {
  double r_front = 0.0;  // sup |x - x0| over supported cells, 0 if none
  double r_empty = std::numeric_limits<double>::infinity();  // inf over supported cells
};

/// Support is u > eps + tol_support.
FrontRadius front_radius(const GridSpec& grid, std::span<const double> u,
                         const std::array<double, 2>& x0, double eps, double tol_support);

struct FrontSample {
  double t;
  double r_front;
  double r_empty;
};

/// Step observer for the support diagnostics: the first time any cell of
/// B_{R'}(x0) enters the support, the first time every interior cell is in
/// the support and whether that persisted afterwards, and radii sampled
/// every sample_dt (every step when 0).
class SupportMonitor {
 public:
  SupportMonitor(const GridSpec& grid, std::array<double, 2> x0, double Rp, double eps,
                 double tol_support, double sample_dt = 0.0);

  void operator()(const StepView& step);
  void record(double t, std::span<const double> u);

  std::optional<double> arrival() const { return arrival_; }
  std::optional<double> all_interior() const { return all_interior_; }
  bool all_interior_persisted() const { return persisted_; }
  const std::vector<FrontSample>& samples() const { return samples_; }

 private:
  GridSpec grid_;
  std::array<double, 2> x0_;
  double Rp_;
  double threshold_;
  double eps_;
  double tol_;
  double sample_dt_;
  double next_sample_ = 0.0;
  std::vector<std::size_t> inner_;
  std::optional<double> arrival_;
  std::optional<double> all_interior_;
  bool persisted_ = true;
  std::vector<FrontSample> samples_;
};

}  // namespace degenstein
