#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "degenstein/coeffs.hpp"
#include "degenstein/grid.hpp"
#include "degenstein/parallel.hpp"

namespace degenstein {

/// H(u)_t = (F(u) + eps) lap u in the box, u = eps + g at t = 0, u = eps psi
/// on the outermost cells.
struct EpsProblem {
  double eps = 1e-6;
  SpaceFunction g = [](const std::array<double, 2>&) { return 0.0; };
  SpaceFunction psi = [](const std::array<double, 2>&) { return 1.0; };
  double T = 0.1;
  std::shared_ptr<const CoefficientTable> table;
  double u_max = 1.0;

  /// eps > 0, T > 0, table present, u_max <= M, initial data inside
  /// [eps min(1, min psi), u_max]; domain error otherwise.
  void validate(const GridSpec& grid) const;
  /// Lower edge of the admissible band, eps min(1, min psi).
  double lower_bound(const GridSpec& grid) const;
};

/// height * max(0, 1 - |x - center| / radius).
SpaceFunction tent_bump(std::array<double, 2> center, double radius, double height);

/// Initial state: eps + g inside, eps psi on boundary cells.
std::vector<double> initial_field(const EpsProblem& prob, const GridSpec& grid);

struct StepView {
  const GridSpec& grid;
  double t_old;
  double dt;
  std::span<const double> u_old;
  std::span<const double> u_new;
  std::span<const double> D;  // diffusivity used by the step
};

struct SolveOptions {
  double safety = 0.4;
  Exec exec = Exec::parallel;
  bool keep_snapshots = true;
  std::function<void(const StepView&)> observer;
};

struct EnergyLedger {
  double dissipation = 0.0;  // int int (H~_t)^2, H~' = sqrt(h / (F + eps))
  double E0 = 0.0;           // int |grad u(0)|^2
  double ET = 0.0;           // int |grad u(T)|^2
  /// sum over steps of int |grad (u_new - u_old)|^2: the explicit scheme
  /// satisfies 2 dissipation + ET - E0 = defect exactly
  double defect = 0.0;
};

struct SolveTrace {
  std::vector<double> times;
  std::vector<std::vector<double>> snapshots;
  std::vector<double> dt_history;
  std::vector<double> max_u_history;
  EnergyLedger energy;
  std::size_t steps = 0;
  double max_D = 0.0;
  double min_u = 0.0;
  double max_u = 0.0;
  /// max |eps + g - eps psi| over boundary cells at t = 0: nonzero means
  /// incompatible data and an initial boundary layer.
  double boundary_mismatch = 0.0;
};

/// Largest step allowed by the explicit stability bound with the given safety.
double stable_dt(const GridSpec& grid, double max_D, double safety = 0.4);

/// One explicit Euler step. CFL error when dt exceeds stable_dt(safety),
/// range error when the result leaves [lower_bound, u_max].
Field step_explicit(const Field& state, const EpsProblem& prob, const GridSpec& grid, double dt,
                    double safety = 0.4, Exec exec = Exec::parallel);

/// Steps at the CFL bound, shortening steps to land on every snapshot time.
/// snapshot_times must be strictly increasing in [0, T]; T is appended when
/// missing.
SolveTrace solve(const EpsProblem& prob, const GridSpec& grid, std::vector<double> snapshot_times,
                 const SolveOptions& options = {});

/// |2 int int (H~_t)^2 + int |grad u(T)|^2 - int |grad u(0)|^2| / max(int |grad u(0)|^2, eps).
double energy_identity_residual(const SolveTrace& trace, const EpsProblem& prob);

struct EpsSweep {
  std::vector<double> eps;
  std::vector<std::vector<double>> final_fields;
  std::vector<double> distances;  // L1 between consecutive final fields
  bool decreasing = false;        // distances strictly decreasing
};

/// Solves the template problem for each eps (nonincreasing, >= 2 entries).
EpsSweep eps_sweep(const EpsProblem& prob_template, const GridSpec& grid,
                   const std::vector<double>& eps_list, const SolveOptions& options = {});

}  // namespace degenstein
