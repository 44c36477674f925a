#include <doctest.h>

#include <cmath>
#include <random>

#include "degenstein/checker.hpp"
#include "degenstein/error.hpp"

using namespace degenstein;

namespace {

const LambdaChoice kOne = LambdaChoice::from_Lambda(1.0);

DegeneracyProfile scaled(const DegeneracyProfile& p, double c) {
  auto q = p;
  auto base = p.P;
  auto dbase = p.dP;
  q.P = [base, c](double s) { return c * base(s); };
  if (dbase) q.dP = [dbase, c](double s) { return c * dbase(s); };
  q.integral_closed_form = nullptr;
  q.natural_tail.reset();
  q.c3 = c * p.c3;
  return q;
}

}  // namespace

TEST_CASE("check_A1: P(s) = s gives C1 = 1") {
  const auto t = CoefficientTable::build(DegeneracyProfile::power(1.0), kOne);
  const auto r = check_A1(t);
  CHECK(r.C1_est == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.pass);
}

TEST_CASE("check_A1: power law s^beta gives the constant beta / (2 beta - 1)") {
  // F = 2^(beta+1) s^(2 beta - 1) and G' = sqrt(F'), so F / (G G') is constant
  for (double beta : {1.5, 2.0, 3.0}) {
    const auto t = CoefficientTable::build(DegeneracyProfile::power(beta), kOne);
    const auto r = check_A1(t);
    CHECK(r.C1_est == doctest::Approx(beta / (2.0 * beta - 1.0)).epsilon(1e-6));
    CHECK(r.small_s_ratio == doctest::Approx(beta / (2.0 * beta - 1.0)).epsilon(1e-6));
  }
}

TEST_CASE("check_A1: exp(-1/s) has a bounded small-s ratio") {
  // F ~ exp(-2/s) s^-1 and F' ~ 2 F / s^2, hence G ~ sqrt(2 F), so the
  // ratio F / (G G') tends to 1/2
  const auto t = CoefficientTable::build(DegeneracyProfile::exp_inv(1.0), kOne);
  const auto r = check_A1(t);
  CHECK(r.pass);
  CHECK(std::isfinite(r.C1_est));
  CHECK(r.small_s_ratio == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("check_A1: a single node is its own sup") {
  const std::vector<double> s{0.5}, F{0.3}, G{0.2}, Fp{0.25};
  const auto r = check_A1(s, F, G, Fp);
  CHECK(r.C1_est == doctest::Approx(0.3 / (0.2 * 0.5)));
  CHECK(r.pass);
}

TEST_CASE("check_A1: G vanishing past the first node is a degenerate error") {
  const std::vector<double> s{0.1, 0.2, 0.3}, F{0.1, 0.2, 0.3}, G{0.0, 0.0, 0.3}, Fp{1, 1, 1};
  try {
    check_A1(s, F, G, Fp);
    FAIL("expected degenerate error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::degenerate);
  }
  const std::vector<double> G0{0.0, 0.2, 0.3};
  CHECK(check_A1(s, F, G0, Fp).C1_est == doctest::Approx(1.0));
}

TEST_CASE("check_A1: a ratio that blows up toward 0 fails") {
  std::vector<double> s, F, G, Fp;
  for (int i = 0; i < 10; ++i) {
    s.push_back(std::ldexp(1.0, i - 10));
    F.push_back(1.0);
    G.push_back(std::pow(s.back(), 2.0));  // F / G grows like s^-2
    Fp.push_back(1.0);
  }
  CHECK_FALSE(check_A1(s, F, G, Fp).pass);
}

TEST_CASE("check_A1 verdict is invariant under P -> c P") {
  for (const auto& e : example_catalog()) {
    CAPTURE(e.profile.name);
    const auto t = CoefficientTable::build(e.profile, e.lam);
    for (double c : {0.5, 0.9}) {
      const auto q = scaled(e.profile, c);
      TableOptions o;
      o.s_min = t.s_min();
      o.tail = t.tail();
      const auto tq = CoefficientTable::build(q, e.lam, o);
      CHECK(check_A1(tq).pass == check_A1(t).pass);
    }
  }
}

TEST_CASE("extrapolate_to_zero is exact on both trend families") {
  std::vector<double> s{1e-6, 2e-6, 4e-6, 8e-6, 1.6e-5};
  std::vector<double> lin, logt;
  for (double v : s) {
    lin.push_back(0.7 + 3.0 * v);
    logt.push_back(0.7 + 3.0 / std::log(1.0 / v));
  }
  CHECK(extrapolate_to_zero(s, lin, 1.0) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(extrapolate_to_zero(s, logt, 1.0) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("geometric_samples stays in the small-s range") {
  const auto a = geometric_samples(1e-8, 1.0);
  CHECK(a.size() == 8);
  CHECK(a[7] == doctest::Approx(1.28e-6));
  const auto b = geometric_samples(5e-3, 1.0);
  CHECK(b.size() == 4);
  CHECK(b.back() <= 1.0 / 16.0);
  const auto c = geometric_samples(0.1, 1.0);
  CHECK(c.size() == 4);  // falls back to the full range
}

TEST_CASE("estimate_A_B: power laws give A = B = 1/beta") {
  for (double beta : {1.0, 2.0}) {
    const auto p = DegeneracyProfile::power(beta);
    const auto t = CoefficientTable::build(p, kOne);
    const auto r = estimate_A_B(p, kOne, t);
    CHECK(r.A_est == doctest::Approx(1.0 / beta).epsilon(1e-8));
    CHECK(r.B_est == doctest::Approx(1.0 / beta).epsilon(1e-6));
    CHECK(r.P2_pass);
    CHECK(r.critical_ratio - r.A_est > 0.0);
  }
}

TEST_CASE("estimate_A_B: exponential families approach 0 and 1 / zeta(0)") {
  const auto e = DegeneracyProfile::exp_inv(1.0);
  CHECK(estimate_A_B(e, kOne, CoefficientTable::build(e, kOne)).B_est < 0.1);
  const auto a = DegeneracyProfile::exp_zeta_affine(1.0, 0.5);
  CHECK(estimate_A_B(a, kOne, CoefficientTable::build(a, kOne)).B_est ==
        doctest::Approx(1.0).epsilon(0.1));
  const auto l = DegeneracyProfile::exp_zeta_log(1.0);
  CHECK(estimate_A_B(l, kOne, CoefficientTable::build(l, kOne)).B_est < 0.1);
}

TEST_CASE("estimate_A_B: A_est >= B_est") {
  for (const auto& e : example_catalog()) {
    const auto r = estimate_A_B(e.profile, e.lam, CoefficientTable::build(e.profile, e.lam));
    CHECK(r.A_est >= r.B_est);
  }
}

TEST_CASE("almost decreasing: power law with mu = 1") {
  const auto p = DegeneracyProfile::power(2.0);
  const auto t = CoefficientTable::build(p, kOne);
  const auto r = check_almost_decreasing(p, t, 1.0);
  CHECK(r.c == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.pass);
  CHECK(r.sPprimeI_sup == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.sPprimeI_limit == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(check_almost_decreasing(p, t, 0.0), Error);
  CHECK_THROWS_AS(check_almost_decreasing(p, t, -1.0), Error);
}

TEST_CASE("almost_decreasing_constant matches an exhaustive pair scan") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> Q(2 + trial % 40);
    double level = 10.0;
    for (auto& q : Q) {
      level *= trial % 2 ? u(rng) : std::min(1.0, u(rng));  // odd: rough, even: monotone
      q = level;
    }
    double brute = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < Q.size(); ++i) {
      for (std::size_t j = i + 1; j < Q.size(); ++j) brute = std::min(brute, Q[i] / Q[j]);
    }
    CHECK(almost_decreasing_constant(Q) == brute);
  }
}

TEST_CASE("auto_lambda clears sup P I with the 50% margin") {
  const auto p = DegeneracyProfile::power(0.4);  // P I = 2.5
  const auto lam = auto_lambda(p);
  CHECK(lam.critical_ratio() == doctest::Approx(3.75).epsilon(1e-6));
  CHECK_NOTHROW(CoefficientTable::build(p, lam));
  CHECK(auto_lambda(DegeneracyProfile::power(1.0)).Lambda == 1.0);
}

TEST_CASE("example catalog") {
  const auto cat = example_catalog();
  REQUIRE(cat.size() == 4);
  CHECK(cat[0].profile.kind == ProfileKind::power);
  CHECK(cat[0].profile.param == 1.0);
  CHECK(*cat[0].expected_A == 1.0);
  CHECK(cat[1].profile.kind == ProfileKind::exp_inv);
  CHECK(cat[1].expected_sPprimeI_limit == 1.0);
  for (const auto& e : cat) {
    CAPTURE(e.profile.name);
    const auto t = CoefficientTable::build(e.profile, e.lam);
    const auto r = check_assumptions(e.profile, e.lam, t);
    for (const auto& v : r.verdicts) {
      CAPTURE(v.name);
      CHECK(v.pass);
    }
    CHECK(matches_expectation(r, e));
    CHECK(r.C2_residual <= 10.0 * t.quad_tol());
    if (r.verdict("P2_sup").pass) CHECK((r.Lambda + 1.0) / r.Lambda - r.A_est > 0.0);
  }
}

TEST_CASE("a profile violating the margin fails P2 but still reports") {
  // P I = 1/beta = 1.9 under Lambda = 1: F' > 0 but the 10% margin is missed
  const auto p = DegeneracyProfile::power(1.0 / 1.9);
  const auto t = CoefficientTable::build(p, kOne);
  const auto r = check_assumptions(p, kOne, t);
  CHECK_FALSE(r.verdict("P2_sup").pass);
  CHECK(r.verdict("A2").pass);
  CHECK_THROWS_AS(r.verdict("nonexistent"), Error);
}
