#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "degenstein/checker.hpp"
#include "degenstein/config.hpp"
#include "degenstein/error.hpp"
#include "degenstein/kinetic.hpp"
#include "degenstein/localization.hpp"
#include "degenstein/solver.hpp"

namespace degenstein {

/// Profile, Lambda and table built once from a config.
struct Experiment {
  ExperimentConfig cfg;
  DegeneracyProfile profile;
  LambdaChoice lam;
  std::shared_ptr<const CoefficientTable> table;

  static Experiment build(const ExperimentConfig& cfg);
  /// The regularized problem of the config with the given eps and final time.
  EpsProblem problem(double eps, double T) const;
  EpsProblem problem() const { return problem(cfg.eps, cfg.T); }
};

struct LocalizationRun {
  SolveTrace trace;
  CutoffFamily cutoffs;
  ExponentPack pack;
  DeGiorgiTrace de_giorgi;
  /// first time a cell of B_R'(x0) exceeded eps + tol_support
  std::optional<double> arrival;
  /// arrival, or T when the inner ball stayed empty for the whole run
  double support_time = 0.0;
  std::optional<double> all_interior;
  bool all_interior_persisted = false;
  std::vector<FrontSample> front;
};

LocalizationRun localize(const Experiment& ex, Exec exec = Exec::parallel);

struct KineticComparison {
  double t = 0.0;
  double sigma = 0.0;  // at the bump peak
  double tau0 = 0.0;
  std::size_t steps = 0;
  double mass = 0.0;
  double l1 = 0.0;
  double relative = 0.0;          // l1 / mass
  double relative_refined = 0.0;  // h / 2 and sigma / 2
  bool decreasing = false;
  KernelMoments moments;
  double variance_target = 0.0;
  double scatter_mass_drift = 0.0;  // max |m(t) / m(0) - 1|, scatter form
  std::vector<double> kinetic;
  std::vector<double> pde;
};

KineticComparison compare_kinetic(const Experiment& ex, Exec exec = Exec::parallel);

/// Files a subcommand writes; every path is relative to the output directory.
struct RunOutputs {
  std::filesystem::path dir;
  bool quiet = false;
  std::ostream* log = nullptr;  // progress lines unless quiet
};

void run_table(const Experiment& ex, const RunOutputs& out);          // table.csv
void run_check(const Experiment& ex, const RunOutputs& out);          // report.json
void run_solve(const Experiment& ex, const RunOutputs& out);          // snapshots.csv, solve.json
void run_localize(const Experiment& ex, const RunOutputs& out);       // degiorgi.json, front.csv
void run_kinetic_compare(const Experiment& ex, const RunOutputs& out);// kinetic.json, kinetic.csv
void run_sweep(const Experiment& ex, const RunOutputs& out);          // sweep.json, sweep.csv
/// table, check, solve and localize in sequence.
void run_all(const Experiment& ex, const RunOutputs& out);

/// JSON forms of the reports, as written to disk.
std::string report_json(const AssumptionReport& report);
std::string error_json(ErrorKind kind, const std::string& message);

}  // namespace degenstein
