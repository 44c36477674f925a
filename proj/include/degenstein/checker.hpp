#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "degenstein/coeffs.hpp"
#include "degenstein/profile.hpp"

namespace degenstein {

struct CheckOptions {
  double margin = 0.10;   // relative pass margin on asymptotic estimates
  double c_floor = 0.5;   // almost-decreasing acceptance
  std::optional<double> mu;  // unset: use the suggested mu = sup s P' I
};

struct A1Result {
  double C1_est = 0.0;
  bool pass = false;
  double small_s_ratio = 0.0;  // F / (G G') extrapolated to s -> 0
  std::vector<double> ratios;  // F / (G G') per node
};

/// C1 = max F / (G G') with G' = sqrt(F'). Fails the verdict when the ratio
/// more than doubles between consecutive nodes among the 8 smallest.
A1Result check_A1(const CoefficientTable& table);
A1Result check_A1(std::span<const double> s, std::span<const double> F,
                  std::span<const double> G, std::span<const double> Fprime);

struct ABEstimate {
  double A_est = 0.0;
  double B_est = 0.0;
  double critical_ratio = 0.0;  // (Lambda + 1) / Lambda
  bool P2_pass = false;         // critical_ratio > A_est (1 + margin)
};

/// Estimate of lim_{s->0} y(s): least-squares lines in x = s / M and in
/// x = 1 / ln(M / s), keeping the intercept of the better fit. Covers
/// algebraic and logarithmic approach to the limit; anything else is an
/// extrapolation and is reported as such.
double extrapolate_to_zero(std::span<const double> s, std::span<const double> y, double M);

/// s_k = s_min 2^k, k < count, capped at M / 16 when that keeps >= 3 points.
std::vector<double> geometric_samples(double s_min, double M, int count = 8);

ABEstimate estimate_A_B(const DegeneracyProfile& profile, const LambdaChoice& lam,
                        const CoefficientTable& table, double margin = 0.10);

struct AlmostDecreasing {
  double mu = 0.0;
  double c = 0.0;               // min over t < s of Q(t) / Q(s), Q = P I^mu
  bool pass = false;
  double sPprimeI_sup = 0.0;    // suggested mu
  double sPprimeI_limit = 0.0;  // extrapolated s -> 0
};

/// Best constant of almost-monotonicity, min_i Q_i / max_{j > i} Q_j.
double almost_decreasing_constant(std::span<const double> Q);

/// As above when mu is given; mu <= 0 is a domain error.
AlmostDecreasing check_almost_decreasing(const DegeneracyProfile& profile,
                                         const CoefficientTable& table,
                                         std::optional<double> mu, double c_floor = 0.5);

struct Verdict {
  std::string name;
  bool pass = false;
  double margin = 0.0;
  std::string detail;
};

struct AssumptionReport {
  std::string profile;
  double Lambda = 0.0;
  double A_est = 0.0;
  double B_est = 0.0;
  double C1_est = 0.0;
  double C1_small_s = 0.0;
  double C2_residual = 0.0;
  double mu_used = 0.0;
  double almost_dec_c = 0.0;
  double sPprimeI_sup = 0.0;
  double sPprimeI_limit = 0.0;
  std::vector<Verdict> verdicts;

  bool all_pass() const;
  const Verdict& verdict(const std::string& name) const;
};

AssumptionReport check_assumptions(const DegeneracyProfile& profile, const LambdaChoice& lam,
                                   const CoefficientTable& table, const CheckOptions& options = {});

/// Lambda for the "auto" choice: A is estimated from P I on 64 log points
/// with the profile's natural tail (1 otherwise), then LambdaChoice::automatic.
LambdaChoice auto_lambda(const DegeneracyProfile& profile, double margin = 0.5);

struct CatalogEntry {
  DegeneracyProfile profile;
  LambdaChoice lam;
  std::optional<double> expected_A;
  double expected_B = 0.0;
  double expected_sPprimeI_limit = 1.0;
  // every verdict in check_assumptions is expected to pass
};

std::vector<CatalogEntry> example_catalog();

/// Compares a report against a catalog entry within the margin: absolute
/// when the expected value is 0, relative otherwise.
bool matches_expectation(const AssumptionReport& report, const CatalogEntry& entry,
                         double margin = 0.10);

}  // namespace degenstein
