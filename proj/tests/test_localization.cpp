#include <doctest.h>

#include <cmath>
#include <random>

#include "degenstein/error.hpp"
#include "degenstein/localization.hpp"

using namespace degenstein;

TEST_CASE("cutoff radii shrink from R to R' with b fixed by the limit") {
  const auto c = CutoffFamily::make({0.0, 0.0}, 0.8, 0.4, 1);
  CHECK(c.b == doctest::Approx(3.0));
  CHECK(c.radius(0) == doctest::Approx(0.8));
  for (int n = 0; n < 20; ++n) CHECK(c.radius(n + 1) < c.radius(n));
  CHECK(c.radius(60) == doctest::Approx(0.4));
  CHECK((c.b - 2.0) / (c.b - 1.0) == doctest::Approx(c.Rp / c.R));
  for (int n = 0; n < 6; ++n) {
    const double gap = c.radius(n) - c.radius(n + 1);
    CHECK(c.lipschitz(n) == doctest::Approx(1.0 / gap));
  }
  CHECK_THROWS_AS(CutoffFamily::make({0.0, 0.0}, 0.4, 0.8, 1), Error);
}

TEST_CASE("cutoff theta is 1 on the inner ball, 0 outside, linear between") {
  const auto c = CutoffFamily::make({0.1, -0.2}, 0.6, 0.2, 2);
  for (int n = 0; n < 5; ++n) {
    const double Rn = c.radius(n), Rn1 = c.radius(n + 1);
    CHECK(c.theta(n, {0.1, -0.2}) == 1.0);
    CHECK(c.theta(n, {0.1 + 0.999 * Rn1, -0.2}) == 1.0);
    CHECK(c.theta(n, {0.1, -0.2 + 1.001 * Rn}) == 0.0);
    const double mid = 0.5 * (Rn + Rn1);
    CHECK(c.theta(n, {0.1 + mid * 0.6, -0.2 + mid * 0.8}) == doctest::Approx(0.5));
  }
}

TEST_CASE("cutoff ball must fit inside the grid") {
  const auto grid = GridSpec::line(-1, 1, 64);
  CHECK_NOTHROW(CutoffFamily::make({0.5, 0.0}, 0.4, 0.2, 1).check_inside(grid));
  try {
    CutoffFamily::make({0.8, 0.0}, 0.4, 0.2, 1).check_inside(grid);
    FAIL("expected a geometry error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::geometry);
  }
}

TEST_CASE("exponent pack identities for random lambda and j") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lam(0.05, 1.95), jd(0.2, 6.0);
  const auto cut = CutoffFamily::make({0.0, 0.0}, 1.0, 0.5, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const double l = lam(rng), j = jd(rng);
    const auto p = ExponentPack::make(1, LambdaChoice::from_lambda(l), 1.3, cut, j, 2.0);
    CHECK(p.k * (2.0 + 2.0 * j - l) == doctest::Approx(2.0 - l));
    CHECK(p.beta * p.k * p.j == doctest::Approx(1.0 - (1.0 + p.j) * p.k));
    // the time weight exponent depends on lambda only
    CHECK(p.beta == doctest::Approx(l / (2.0 - l)));
    CHECK(p.k > 0.0);
    CHECK(p.k < 1.0);
    const double b = cut.b;
    const double D = std::pow(b, 4) * (2.0 * 1.3 * 1.3 + 1.0) * std::pow(2.0, p.k * (1.0 + j));
    CHECK(p.D == doctest::Approx(D));
  }
}

TEST_CASE("default j by dimension") {
  const auto cut = CutoffFamily::make({0.0, 0.0}, 1.0, 0.5, 1);
  const auto lam = LambdaChoice::from_Lambda(1.0);
  CHECK(ExponentPack::make(1, lam, 1.0, cut).j == 2.0);
  CHECK(ExponentPack::make(2, lam, 1.0, cut).j == 2.0);
  CHECK(ExponentPack::make(4, lam, 1.0, cut).j == 1.0);
  // Lambda = 1: lambda = 1, k = 1/5, beta = 1
  const auto p = ExponentPack::make(1, lam, 1.0, cut);
  CHECK(p.k == doctest::Approx(0.2));
  CHECK(p.beta == doctest::Approx(1.0));
}

TEST_CASE("lady_bound reproduces the equality recursion") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lc(-2.0, 2.0), lb(0.0, 1.5), dd(0.05, 1.0),
      ly(-4.0, 0.0);
  std::uniform_int_distribution<int> nd(0, 15);
  int compared = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double c = std::exp(lc(rng)), b = std::exp(lb(rng)), delta = dd(rng);
    const double y0 = std::exp(ly(rng));
    const int n = nd(rng);
    double log_y = std::log(y0);
    for (int m = 0; m < n; ++m) log_y = std::log(c) + m * std::log(b) + (1.0 + delta) * log_y;
    const double bound = lady_bound(c, b, delta, y0, n);
    if (bound == 0.0 || !std::isfinite(bound) || std::abs(log_y) > 600.0) continue;
    ++compared;
    CHECK(std::log(bound) == doctest::Approx(log_y).epsilon(1e-9).scale(1.0));
  }
  CHECK(compared > 500);
}

TEST_CASE("lady_bound special cases") {
  CHECK(lady_bound(3.0, 2.0, 0.5, 0.0, 7) == 0.0);
  for (int n = 0; n < 6; ++n) {
    CHECK(lady_bound(1.0, 1.0, 1.0, 0.5, n) == doctest::Approx(std::pow(0.5, std::pow(2.0, n))));
  }
  // starting exactly at the threshold the bound decays like b^(-n / delta)
  const double c = 5.0, b = 4.0, delta = 0.4;
  const double th = lady_threshold(c, b, delta);
  for (int n = 0; n < 10; ++n) {
    CHECK(lady_bound(c, b, delta, th, n) ==
          doctest::Approx(th * std::pow(b, -n / delta)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(lady_bound(0.0, 2.0, 0.5, 0.1, 3), Error);
  CHECK_THROWS_AS(lady_threshold(1.0, 0.5, 0.5), Error);
}

namespace {

SolveTrace constant_trace(const GridSpec& grid, double s, std::vector<double> times) {
  SolveTrace tr;
  tr.times = std::move(times);
  tr.snapshots.assign(tr.times.size(), std::vector<double>(grid.cells(), s));
  return tr;
}

}  // namespace

TEST_CASE("energy_Y of a constant state matches the cutoff integrals") {
  const auto table = CoefficientTable::build(DegeneracyProfile::power(1.0),
                                             LambdaChoice::from_Lambda(1.0));
  const auto grid = GridSpec::line(-1, 1, 4001);
  const auto cut = CutoffFamily::make({0.0, 0.0}, 0.8, 0.4, 1);
  const auto pack = ExponentPack::make(1, LambdaChoice::from_Lambda(1.0), 1.0, cut);
  const double s = 0.3, T = 0.05;
  const auto tr = constant_trace(grid, s, {0.0, 0.02, T});
  const double H = table.eval(Column::H, s), G = table.eval(Column::G, s);
  for (int n = 0; n <= 3; ++n) {
    const double Rn1 = cut.radius(n + 1), gap = cut.radius(n) - Rn1;
    const double theta2 = 2.0 * (Rn1 + gap / 3.0);
    const double grad2 = 2.0 / gap;
    for (double Tp : {T, 0.03, 0.01}) {
      const double expected = std::pow(Tp, pack.beta) * (H * theta2 + Tp * G * G * grad2);
      CHECK(energy_Y(tr, grid, cut, pack, table, n, Tp) == doctest::Approx(expected).epsilon(2e-2));
    }
  }
}

TEST_CASE("energy_Y is nondecreasing in T' and vanishes at 0") {
  const auto table = CoefficientTable::build(DegeneracyProfile::power(1.0),
                                             LambdaChoice::from_Lambda(1.0));
  const auto grid = GridSpec::line(-1, 1, 201);
  const auto cut = CutoffFamily::make({0.0, 0.0}, 0.8, 0.4, 1);
  const auto pack = ExponentPack::make(1, LambdaChoice::from_Lambda(1.0), 1.0, cut);
  EpsProblem p;
  p.eps = 1e-6;
  p.table = std::make_shared<const CoefficientTable>(table);
  p.T = 0.01;
  p.g = tent_bump({0.1, 0.0}, 0.3, 0.2);
  std::vector<double> times;
  for (int k = 0; k <= 10; ++k) times.push_back(0.001 * k);
  const auto tr = solve(p, grid, times);
  const auto samples = energy_samples(tr, grid, cut, table, 3);
  CHECK(energy_Y(samples, pack, 0, 0.0) == 0.0);
  double prev = 0.0;
  for (double Tp = 1e-4; Tp <= 0.01; Tp += 7e-4) {
    const double y = energy_Y(samples, pack, 0, Tp);
    CHECK(y >= prev);
    prev = y;
  }
  // nested cutoffs: theta_{n+1} <= theta_n pointwise, so S shrinks with n
  for (std::size_t k = 0; k < samples.times.size(); ++k) {
    for (int n = 0; n < 3; ++n) CHECK(samples.S[n + 1][k] <= samples.S[n][k]);
  }
}

TEST_CASE("estimate_T_prime sits on the threshold") {
  const auto table = CoefficientTable::build(DegeneracyProfile::power(1.0),
                                             LambdaChoice::from_Lambda(1.0));
  const auto grid = GridSpec::line(-1, 1, 201);
  const auto cut = CutoffFamily::make({0.0, 0.0}, 0.8, 0.4, 1);
  const auto pack = ExponentPack::make(1, LambdaChoice::from_Lambda(1.0), 1.0, cut);
  const auto tr = constant_trace(grid, 0.3, {0.0, 1.0});
  const auto samples = energy_samples(tr, grid, cut, table, 0);
  const double th = pack.threshold(cut.b);
  const double Tp = estimate_T_prime(samples, pack, cut.b);
  REQUIRE(Tp > 0.0);
  REQUIRE(Tp < 1.0);
  CHECK(energy_Y(samples, pack, 0, Tp) <= th);
  CHECK(energy_Y(samples, pack, 0, Tp * (1.0 + 1e-9)) > th * (1.0 - 1e-6));
  // short horizon: Y_0[T] is already below the threshold and T' = T
  const auto brief = energy_samples(constant_trace(grid, 0.3, {0.0, 1e-16}), grid, cut, table, 0);
  CHECK(estimate_T_prime(brief, pack, cut.b) == 1e-16);
}

TEST_CASE("de_giorgi bounds follow the recursion definition") {
  const auto table = CoefficientTable::build(DegeneracyProfile::power(1.0),
                                             LambdaChoice::from_Lambda(1.0));
  const auto grid = GridSpec::line(-1, 1, 401);
  const auto cut = CutoffFamily::make({0.0, 0.0}, 0.8, 0.4, 1);
  const auto pack = ExponentPack::make(1, LambdaChoice::from_Lambda(1.0), 1.0, cut);
  const auto tr = constant_trace(grid, 1e-3, {0.0, 0.01});
  const auto dg = de_giorgi(tr, grid, cut, pack, table, 4);
  REQUIRE(dg.Y.size() == 5);
  CHECK(dg.T_eval == 0.01);
  CHECK(dg.bound[0] == dg.Y[0]);
  for (int n = 1; n <= 4; ++n) {
    const double b = pack.D * std::pow(cut.b, 2.0 * (n - 1)) * std::pow(dg.Y[n - 1], 1.0 + pack.delta());
    CHECK(dg.bound[n] == doctest::Approx(b));
  }
  CHECK(dg.threshold == doctest::Approx(pack.threshold(cut.b)));
}

TEST_CASE("front_radius on hand-built fields") {
  const auto grid = GridSpec::line(0, 1, 20);  // centers 0.025, 0.075, ...
  const double eps = 1e-6;
  std::vector<double> u(20, eps);
  auto r = front_radius(grid, u, {0.5, 0.0}, eps, 1e-8);
  CHECK(r.r_front == 0.0);
  CHECK(std::isinf(r.r_empty));
  u[3] = 0.1;   // center 0.175
  u[14] = 0.1;  // center 0.725
  r = front_radius(grid, u, {0.5, 0.0}, eps, 1e-8);
  CHECK(r.r_front == doctest::Approx(0.325));
  CHECK(r.r_empty == doctest::Approx(0.225));
  u[14] = eps + 5e-9;  // below the tolerance
  r = front_radius(grid, u, {0.5, 0.0}, eps, 1e-8);
  CHECK(r.r_empty == doctest::Approx(0.325));
}

TEST_CASE("support monitor records arrival and persistence") {
  const auto grid = GridSpec::line(0, 1, 20);
  const double eps = 1e-6;
  SupportMonitor mon(grid, {0.5, 0.0}, 0.1, eps, 10 * eps);
  std::vector<double> u0(20, eps), u1(20, eps), u2(20, 1.0), D(20, 1.0);
  u1[2] = 0.5;
  mon(StepView{grid, 0.0, 0.1, u0, u1, D});
  CHECK_FALSE(mon.arrival());
  u2.front() = eps;
  u2.back() = eps;
  mon(StepView{grid, 0.1, 0.1, u1, u2, D});
  REQUIRE(mon.arrival());
  CHECK(*mon.arrival() == doctest::Approx(0.2));
  REQUIRE(mon.all_interior());
  CHECK(mon.all_interior_persisted());
  mon(StepView{grid, 0.2, 0.1, u2, u1, D});
  CHECK_FALSE(mon.all_interior_persisted());
  CHECK(mon.samples().size() == 4);
}
