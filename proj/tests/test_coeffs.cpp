#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "degenstein/coeffs.hpp"
#include "degenstein/error.hpp"

using namespace degenstein;

namespace {

// Romberg extrapolation of successively halved trapezoid sums; the test-side
// oracle for G, independent of the Gauss-Kronrod path in the library.
template <class F>
double romberg(F&& f, double a, double b, double rel_tol) {
  std::vector<double> prev, cur;
  double h = b - a;
  double trap = 0.5 * h * (f(a) + f(b));
  prev.push_back(trap);
  std::size_t n = 1;
  for (int level = 1; level < 22; ++level) {
    h *= 0.5;
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) sum += f(a + (2.0 * static_cast<double>(k) + 1.0) * h);
    n *= 2;
    cur.assign(static_cast<std::size_t>(level) + 1, 0.0);
    cur[0] = 0.5 * prev[0] + h * sum;
    double factor = 4.0;
    for (int m = 1; m <= level; ++m) {
      cur[m] = cur[m - 1] + (cur[m - 1] - prev[m - 1]) / (factor - 1.0);
      factor *= 4.0;
    }
    if (level > 4 && std::abs(cur[level] - prev[level - 1]) <= rel_tol * std::abs(cur[level])) {
      return cur[level];
    }
    prev = cur;
  }
  return prev.back();
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("integral_I: power profile against closed form") {
  const auto p = DegeneracyProfile::power(1.0);
  CHECK(integral_I(p, 0.5, 1.0) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(integral_I(p, 1.0, 1.0) == 1.0);
  CHECK_THROWS_AS(integral_I(p, 0.0, 1.0), Error);
  CHECK_THROWS_AS(integral_I(p, -1.0, 1.0), Error);
}

TEST_CASE("integral_I: exp(-1/s) against Ei(2) - Ei(1)") {
  // int_{1/2}^1 exp(1/t)/t dt = Ei(2) - Ei(1), evaluated at 30 digits
  const double oracle = 3.0591165396459534079;
  const auto p = DegeneracyProfile::exp_inv(1.0);
  CHECK(rel(integral_I(p, 0.5, 0.0, 1e-10), oracle) < 1e-10);
  CHECK(rel(integral_I(p, 0.5, 1.0), oracle + 1.0) < 1e-8);
}

TEST_CASE("integral_I: exp-zeta profiles against high-precision quadrature") {
  // mpmath at 30 digits over 60 log-spaced panels
  CHECK(rel(integral_I(DegeneracyProfile::exp_zeta_affine(1.0, 0.5), 1e-3, 0.0),
            1641.5681083995041209) < 1e-8);
  CHECK(rel(integral_I(DegeneracyProfile::exp_zeta_log(1.0), 1e-3, 0.0),
            2956836527160.0868259) < 1e-8);
}

TEST_CASE("integral_I: overflowing integrand is a divergence error") {
  const auto p = DegeneracyProfile::exp_inv(1.0);
  try {
    integral_I(p, 1e-4, 1.0);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::divergence);
  }
}

TEST_CASE("integral_I agrees with the closed form at 32 random points") {
  std::mt19937_64 rng(7);
  for (double beta : {0.5, 1.0, 2.0, 3.0}) {
    const auto p = DegeneracyProfile::power(beta);
    const double tail = *p.natural_tail;
    std::uniform_real_distribution<double> logs(std::log(1e-8), 0.0);
    for (int k = 0; k < 32; ++k) {
      const double s = std::exp(logs(rng));
      CHECK(rel(integral_I(p, s, tail), p.integral_closed_form(s) + tail) < 1e-8);
    }
  }
}

TEST_CASE("LambdaChoice") {
  for (double L : {0.25, 1.0, 3.0, 17.5}) {
    const auto lam = LambdaChoice::from_Lambda(L);
    CHECK(lam.lambda * (lam.Lambda + 1.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(lam.lambda > 0.0);
    CHECK(lam.lambda < 2.0);
  }
  CHECK(LambdaChoice::from_lambda(1.0).Lambda == doctest::Approx(1.0));
  CHECK_THROWS_AS(LambdaChoice::from_Lambda(0.0), Error);
  CHECK_THROWS_AS(LambdaChoice::from_lambda(2.0), Error);

  // (Lambda+1)/Lambda = 1.5 A whenever that forces Lambda < 1
  const auto a = LambdaChoice::automatic(2.0);
  CHECK(a.critical_ratio() == doctest::Approx(3.0));
  CHECK(LambdaChoice::automatic(1.0).Lambda == 1.0);
  CHECK(LambdaChoice::automatic(1.0).critical_ratio() > 1.0);
}

TEST_CASE("build_table: P(s) = s, Lambda = 1 reproduces H = F = G = s") {
  const auto p = DegeneracyProfile::power(1.0);
  const auto t = CoefficientTable::build(p, LambdaChoice::from_Lambda(1.0));
  CHECK(t.size() == 256);
  CHECK(t.s_min() == doctest::Approx(1e-8));
  CHECK(t.M() == 1.0);
  CHECK(t.tail() == 1.0);
  CHECK(t.eval(Column::I, 0.5) == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(t.eval(Column::H, 0.5) == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(t.eval(Column::F, 0.5) == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(t.eval(Column::G, 0.5) == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(t.eval(Column::h, 0.5) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(std::abs(t.eval(Column::F, 0.25) - 0.25) < 1e-6);
  const auto nodes = t.nodes();
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(rel(t.column(Column::G)[i], nodes[i]) < 1e-7);
    CHECK(rel(t.column(Column::Fprime)[i], 1.0) < 1e-7);
  }
}

TEST_CASE("build_table: P(s) = s^2 gives P I = 1/2 at every node") {
  const auto p = DegeneracyProfile::power(2.0);
  const auto t = CoefficientTable::build(p, LambdaChoice::from_Lambda(1.0));
  const auto s = t.nodes();
  const auto I = t.column(Column::I);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(rel(p(s[i]) * I[i], 0.5) < 1e-8);
}

TEST_CASE("build_table: node identities and monotonicity for every catalog profile") {
  const std::vector<DegeneracyProfile> profiles{
      DegeneracyProfile::power(1.0), DegeneracyProfile::power(2.0),
      DegeneracyProfile::power(0.75, 2.0), DegeneracyProfile::exp_inv(1.0),
      DegeneracyProfile::exp_zeta_affine(1.0, 0.5), DegeneracyProfile::exp_zeta_log(1.0)};
  for (const auto& p : profiles) {
    CAPTURE(p.name);
    for (double L : {1.0, 2.0}) {
      const auto t = CoefficientTable::build(p, LambdaChoice::from_Lambda(L));
      const auto inv = t.invariants(p);
      const double tol = 10.0 * t.quad_tol();
      CHECK(inv.sF_vs_H <= tol);
      CHECK(inv.hsP_vs_H <= tol);
      CHECK(inv.sF_pow_vs_H <= tol);
      CHECK(inv.G_over_sqrt_sF <= 1.0 + tol);
      CHECK(inv.monotone_H);
      CHECK(inv.monotone_F);
      CHECK(inv.monotone_G);
      CHECK(inv.nonincreasing_I);
    }
  }
}

TEST_CASE("build_table: H(s_min) and G(s_min) shrink as s_min -> 0") {
  const auto p = DegeneracyProfile::power(1.5);
  const auto lam = LambdaChoice::from_Lambda(1.0);
  double lastH = 1.0, lastG = 1.0;
  for (double s_min : {1e-2, 1e-4, 1e-6, 1e-8}) {
    TableOptions o;
    o.s_min = s_min;
    const auto t = CoefficientTable::build(p, lam, o);
    CHECK(t.column(Column::H)[0] < lastH);
    CHECK(t.column(Column::G)[0] < lastG);
    lastH = t.column(Column::H)[0];
    lastG = t.column(Column::G)[0];
  }
  CHECK(lastH < 1e-10);
  CHECK(lastG < 1e-10);
}

TEST_CASE("build_table: sup P I above (Lambda+1)/Lambda is an assumption error") {
  // P = s^0.4: P I = 2.5 > 2
  const auto p = DegeneracyProfile::power(0.4);
  try {
    CoefficientTable::build(p, LambdaChoice::from_Lambda(1.0));
    FAIL("expected assumption error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::assumption);
  }
  CHECK_NOTHROW(CoefficientTable::build(p, LambdaChoice::from_Lambda(0.5)));
}

TEST_CASE("build_table: s_min too small for exp(-1/s) is a divergence error") {
  TableOptions o;
  o.s_min = 1e-4;
  CHECK_THROWS_AS(CoefficientTable::build(DegeneracyProfile::exp_inv(1.0),
                                          LambdaChoice::from_Lambda(1.0), o),
                  Error);
  const double auto_s_min =
      default_s_min(DegeneracyProfile::exp_inv(1.0), LambdaChoice::from_Lambda(1.0));
  CHECK(auto_s_min > 1e-3);
  CHECK(auto_s_min < 1e-2);
}

TEST_CASE("G agrees with a Romberg trapezoid oracle at 8 random points") {
  std::mt19937_64 rng(11);
  const auto lam = LambdaChoice::from_Lambda(1.0);

  SUBCASE("power beta = 2, closed-form F' = 12 s^2") {
    const auto p = DegeneracyProfile::power(2.0);
    const auto t = CoefficientTable::build(p, lam);
    std::uniform_int_distribution<std::size_t> pick(1, t.size() - 1);
    for (int k = 0; k < 8; ++k) {
      const std::size_t i = pick(rng);
      const double s = t.nodes()[i];
      const double oracle =
          romberg([](double x) { return std::sqrt(12.0) * x; }, 0.0, s, 1e-12);
      CHECK(rel(t.column(Column::G)[i], oracle) < 10.0 * t.quad_tol());
    }
  }

  SUBCASE("exp-zeta affine, no closed-form I") {
    const auto p = DegeneracyProfile::exp_zeta_affine(1.0, 0.5);
    TableOptions o;
    o.s_min = 1e-6;
    const auto t = CoefficientTable::build(p, lam, o);
    boost::math::quadrature::tanh_sinh<double> ts;
    const double tail = t.tail();
    auto I = [&](double x) {
      return tail + ts.integrate([&](double y) { return 1.0 / p(std::exp(y)); }, std::log(x), 0.0,
                                 1e-13);
    };
    auto sqrt_fp = [&](double x) {
      const double Ix = I(x);
      const double gap = 2.0 - p(x) * Ix;
      return std::sqrt(gap / (x * x * Ix * Ix * Ix * p(x)));
    };
    std::uniform_int_distribution<std::size_t> pick(8, t.size() - 1);
    const double s0 = t.nodes()[0];
    for (int k = 0; k < 8; ++k) {
      const std::size_t i = pick(rng);
      const double s = t.nodes()[i];
      const double oracle = romberg(
          [&](double y) {
            const double x = std::exp(y);
            return sqrt_fp(x) * x;
          },
          std::log(s0), std::log(s), 1e-11);
      const double measured = t.column(Column::G)[i] - t.column(Column::G)[0];
      CHECK(rel(measured, oracle) < 10.0 * t.quad_tol());
    }
  }
}

TEST_CASE("F' by central differences tracks the closed form") {
  const auto p = DegeneracyProfile::exp_zeta_affine(1.0, 0.5);
  const auto lam = LambdaChoice::from_Lambda(1.0);
  TableOptions fd;
  fd.fprime = FprimeMethod::central_difference;
  const auto exact = CoefficientTable::build(p, lam);
  const auto approx = CoefficientTable::build(p, lam, fd);
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < exact.size(); ++i) {
    worst = std::max(worst, rel(approx.column(Column::Fprime)[i], exact.column(Column::Fprime)[i]));
  }
  CHECK(worst < 1e-2);
  // second order: halving the log spacing cuts the error by ~4
  fd.K = 511;
  TableOptions fine_exact;
  fine_exact.K = 511;
  const auto approx2 = CoefficientTable::build(p, lam, fd);
  const auto exact2 = CoefficientTable::build(p, lam, fine_exact);
  double worst2 = 0.0;
  for (std::size_t i = 1; i + 1 < exact2.size(); ++i) {
    worst2 = std::max(worst2, rel(approx2.column(Column::Fprime)[i], exact2.column(Column::Fprime)[i]));
  }
  CHECK(worst / worst2 > 3.0);
}

TEST_CASE("eval: exact at nodes, clamped at the ends, domain error outside") {
  const auto t = CoefficientTable::build(DegeneracyProfile::exp_zeta_log(1.0),
                                         LambdaChoice::from_Lambda(1.0));
  for (auto c : all_columns) {
    for (std::size_t i = 0; i < t.size(); i += 17) {
      CHECK(t.eval(c, t.nodes()[i]) == t.column(c)[i]);
    }
    CHECK(t.eval(c, t.s_min()) == t.column(c)[0]);
    CHECK(t.eval(c, t.M()) == t.column(c)[t.size() - 1]);
    CHECK_THROWS_AS(t.eval(c, 0.5 * t.s_min()), Error);
    CHECK_THROWS_AS(t.eval(c, 2.0 * t.M()), Error);
    CHECK(t.eval_clamped(c, 0.5 * t.s_min()) == t.column(c)[0]);
  }
}

TEST_CASE("eval: interpolant is monotone between nodes") {
  const auto t = CoefficientTable::build(DegeneracyProfile::exp_inv(1.0),
                                         LambdaChoice::from_Lambda(1.0));
  for (auto c : {Column::H, Column::F, Column::G}) {
    double last = 0.0;
    for (int k = 0; k <= 5000; ++k) {
      const double s = t.s_min() * std::pow(t.M() / t.s_min(), k / 5000.0);
      const double v = t.eval(c, std::min(s, t.M()));
      CHECK(v >= last);
      last = v;
    }
  }
}

TEST_CASE("CSV dump/load preserves every node and the interpolant") {
  const auto lam = LambdaChoice::from_Lambda(1.0);
  const auto t = CoefficientTable::build(DegeneracyProfile::exp_zeta_affine(1.0, 0.5), lam);
  std::stringstream buf;
  t.write_csv(buf);
  const auto header = buf.str().substr(0, buf.str().find('\n'));
  CHECK(header == "s,I,H,h,F,Fprime,G");
  const auto back = CoefficientTable::from_csv(buf, lam);
  REQUIRE(back.size() == t.size());
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(std::log(t.s_min()), std::log(t.M()));
  for (int k = 0; k < 64; ++k) {
    const double s = std::exp(u(rng));
    for (auto c : all_columns) CHECK(back.eval(c, s) == t.eval(c, s));
  }
}

TEST_CASE("profile validation") {
  CHECK_NOTHROW(DegeneracyProfile::power(1.0).validate(1e-8));
  CHECK_NOTHROW(DegeneracyProfile::exp_zeta_log(1.0).validate(1e-8));
  CHECK_NOTHROW(DegeneracyProfile::exp_inv(1.0).validate(5e-3));
  // the nondegenerate control is exempt from the decay requirement
  CHECK_NOTHROW(DegeneracyProfile::constant(1.0).validate(1e-8));
  auto tall = DegeneracyProfile::power(1.0);
  tall.c3 = 0.5;
  CHECK_THROWS_AS(tall.validate(1e-8), Error);
  auto flat = DegeneracyProfile::power(1.0);
  flat.P = [](double s) { return 0.5 + 0.5 * s; };
  CHECK_THROWS_AS(flat.validate(1e-8), Error);
}

TEST_CASE("custom profile reproduces a sampled power law") {
  std::vector<double> s, v;
  for (int k = 0; k <= 40; ++k) {
    const double x = std::pow(10.0, -8.0 + 0.2 * k);
    s.push_back(x);
    v.push_back(x * x);
  }
  const auto p = DegeneracyProfile::custom(s, v);
  CHECK(p.M == doctest::Approx(1.0));
  CHECK(p(0.3) == doctest::Approx(0.09).epsilon(1e-12));
  CHECK(p(1e-9) == doctest::Approx(1e-18).epsilon(1e-9));
  const auto t = CoefficientTable::build(p, LambdaChoice::from_Lambda(1.0));
  // no natural tail, so the tail is 1/Lambda: I(1/2) = (4 - 1)/2 + 1
  CHECK(t.eval(Column::H, 0.5) == doctest::Approx(0.4).epsilon(1e-5));
}
