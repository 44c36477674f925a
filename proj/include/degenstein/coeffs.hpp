#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <math.h>  // boost 1.74 pchip calls isnan unqualified
#include <boost/math/interpolators/pchip.hpp>

#include "degenstein/profile.hpp"

namespace degenstein {

/// Lambda (time-weight exponent) and lambda = 2 / (Lambda + 1).
struct LambdaChoice {
  double Lambda = 1.0;
  double lambda = 1.0;

  static LambdaChoice from_Lambda(double Lambda);
  static LambdaChoice from_lambda(double lambda);
  /// Picks (Lambda + 1) / Lambda = A_est (1 + margin) when that needs
  /// Lambda < 1; otherwise Lambda = 1 already clears the margin.
  static LambdaChoice automatic(double A_est, double margin = 0.5);

  /// (Lambda + 1) / Lambda, the bound that sup P I must stay under.
  double critical_ratio() const { return (Lambda + 1.0) / Lambda; }
};

enum class Column : std::size_t { I = 0, H, h, F, Fprime, G };
inline constexpr std::size_t column_count = 6;
inline constexpr std::array<Column, column_count> all_columns{
    Column::I, Column::H, Column::h, Column::F, Column::Fprime, Column::G};
std::string_view to_string(Column c) noexcept;

enum class FprimeMethod {
  closed_form,         // F' from the P-I identity, exact given I
  central_difference,  // second-order differences of F on the log grid
};

struct TableOptions {
  double s_min = 0.0;  // 0 selects default_s_min
  std::size_t K = 256;
  double quad_tol = 1e-8;
  std::optional<double> tail;  // unset selects default_tail
  FprimeMethod fprime = FprimeMethod::closed_form;
};

/// int_M^inf contribution: the exact tail when the profile defines one,
/// 1 / Lambda otherwise.
double default_tail(const DegeneracyProfile& profile, const LambdaChoice& lam);

/// max(1e-8 M, s*) where P(s*) sits at the smallest value whose derived
/// coefficients stay representable in double precision.
double default_s_min(const DegeneracyProfile& profile, const LambdaChoice& lam);

/// I(s) = int_s^M dsigma / (sigma P(sigma)) + tail, by adaptive Gauss-Kronrod
/// under sigma = e^t.
double integral_I(const DegeneracyProfile& profile, double s, double tail,
                  double quad_tol = 1e-8);

/// Max residuals of the node-by-node identities a built table must satisfy.
struct TableInvariants {
  double sF_vs_H = 0.0;        // |s F / H^(Lambda+1) - 1|
  double hsP_vs_H = 0.0;       // |h s P / H^(Lambda+1) - 1|
  double sF_pow_vs_H = 0.0;    // |(s F)^(lambda/2) / H - 1|
  double G_over_sqrt_sF = 0.0; // max G / sqrt(s F), must be <= 1
  bool monotone_H = true;
  bool monotone_F = true;
  bool monotone_G = true;
  bool nonincreasing_I = true;
};

/// Sampled coefficient calculus on a log grid. Immutable once built.
class CoefficientTable {
 public:
  static CoefficientTable build(const DegeneracyProfile& profile, const LambdaChoice& lam,
                                const TableOptions& options = {});

  /// Heat-equation stand-in for P == const: h = F = 1, H = G = s.
  static CoefficientTable nondegenerate_control(double s_min, double M, std::size_t K = 256);

  static CoefficientTable from_csv(std::istream& in, const LambdaChoice& lam,
                                   double quad_tol = 1e-8);
  void write_csv(std::ostream& out) const;

  /// Monotone interpolation; exact at nodes; domain error outside [s_min, M].
  double eval(Column column, double s) const;
  /// As eval with s clamped into [s_min, M].
  double eval_clamped(Column column, double s) const;

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> column(Column c) const {
    return values_[static_cast<std::size_t>(c)];
  }
  std::size_t size() const { return nodes_.size(); }
  double s_min() const { return nodes_.front(); }
  double M() const { return nodes_.back(); }
  const LambdaChoice& lambda() const { return lam_; }
  double quad_tol() const { return quad_tol_; }
  double tail() const { return tail_; }
  bool is_control() const { return control_; }

  TableInvariants invariants(const DegeneracyProfile& profile) const;

 private:
  using Spline = boost::math::interpolators::pchip<std::vector<double>>;

  CoefficientTable() = default;
  void finalize();

  std::vector<double> nodes_;
  std::array<std::vector<double>, column_count> values_;
  std::vector<std::optional<Spline>> splines_;
  std::array<bool, column_count> log_values_{};
  LambdaChoice lam_;
  double quad_tol_ = 1e-8;
  double tail_ = 1.0;
  bool control_ = false;
};

}  // namespace degenstein
