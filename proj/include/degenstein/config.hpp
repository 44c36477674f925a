#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "degenstein/coeffs.hpp"
#include "degenstein/grid.hpp"
#include "degenstein/kinetic.hpp"
#include "degenstein/profile.hpp"

namespace degenstein {

struct ProfileSpec {
  std::string kind = "power";  // power, exp_inv, exp_zeta_affine, exp_zeta_log, custom, constant
  double beta = 1.0;
  double M = 1.0;
  std::optional<double> c3;
  double z0 = 1.0;
  double z1 = 0.5;
  std::string custom_table;  // CSV with header s,P
};

struct TableSpec {
  std::size_t K = 256;
  std::optional<double> s_min;
  double quad_tol = 1e-8;
  std::optional<double> tail;
  FprimeMethod fprime = FprimeMethod::closed_form;
};

struct BumpSpec {
  std::array<double, 2> center{-0.6, 0.0};
  double radius = 0.2;
  double height = 0.2;
};

/// psi(x) = c0 + c1 . x on the boundary layer.
struct PsiSpec {
  double c0 = 1.0;
  std::array<double, 2> c1{0.0, 0.0};
};

struct LocalizationSpec {
  std::array<double, 2> x0{0.5, 0.0};
  double R = 0.4;
  double Rp = 0.2;
  int n_max = 6;
  std::optional<double> tol_support;  // default 10 eps
  double slack = 2.0;
};

struct ExponentSpec {
  std::optional<double> j;
  double S = 1.0;
};

struct KineticSpec {
  KernelShape shape = KernelShape::gaussian_truncated;
  MasterForm form = MasterForm::gather;
  std::optional<double> tau0;  // default: sigma = sigma_cells h at the bump peak
  double sigma_cells = 4.0;
  double a = 1.0;
  double dt_fraction = 0.25;
  double T = 0.01;
};

struct ExperimentConfig {
  ProfileSpec profile;
  std::optional<double> Lambda = 1.0;  // nullopt: "auto"
  TableSpec table;
  GridSpec grid = GridSpec::line(-1.0, 1.0, 401);
  double eps = 1e-6;
  std::vector<double> eps_sweep{1e-3, 5e-4, 2.5e-4, 1.25e-4, 6.25e-5};
  BumpSpec bump;
  PsiSpec psi;
  LocalizationSpec localization;
  ExponentSpec exponents;
  double T = 0.2;
  std::vector<double> snapshots;  // empty: snapshot_count uniform times in (0, T]
  int snapshot_count = 64;
  std::optional<double> u_max;
  KineticSpec kinetic;
  std::string output_dir = "out";

  /// Parse-time checks of every module precondition the config reaches;
  /// config error on the first violation.
  void validate() const;

  std::vector<double> snapshot_times() const;
  double tol_support() const { return localization.tol_support.value_or(10.0 * eps); }
};

/// Reads a JSON config; unknown keys are config errors.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& json_text);

DegeneracyProfile make_profile(const ProfileSpec& spec);
LambdaChoice make_lambda(const ExperimentConfig& cfg, const DegeneracyProfile& profile);
CoefficientTable make_table(const ExperimentConfig& cfg, const DegeneracyProfile& profile,
                            const LambdaChoice& lam);

}  // namespace degenstein
