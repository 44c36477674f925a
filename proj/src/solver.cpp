#include "degenstein/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "degenstein/error.hpp"
#include "degenstein/kernels.hpp"

namespace degenstein {

namespace {

constexpr double kSlack = 1e-12;

void check_range(std::span<const double> u, double lower, double upper, double t) {
  const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
  if (*lo < lower * (1.0 - kSlack) || *hi > upper * (1.0 + kSlack) || !std::isfinite(*hi)) {
    std::ostringstream msg;
    msg << "solution left [" << lower << ", " << upper << "] at t = " << t << ": min " << *lo
        << ", max " << *hi;
    fail(ErrorKind::range, msg.str());
  }
}

double max_of(std::span<const double> v) { return *std::max_element(v.begin(), v.end()); }

}  // namespace

double EpsProblem::lower_bound(const GridSpec& grid) const {
  double min_psi = 1.0;
  for (std::size_t c = 0; c < grid.cells(); ++c) {
    if (grid.is_boundary(c)) min_psi = std::min(min_psi, psi(grid.center_of(c)));
  }
  return eps * min_psi;
}

void EpsProblem::validate(const GridSpec& grid) const {
  grid.validate();
  require(eps > 0.0, ErrorKind::domain, "eps must be positive");
  require(T > 0.0, ErrorKind::domain, "final time must be positive");
  require(static_cast<bool>(table), ErrorKind::domain, "problem has no coefficient table");
  require(u_max > 0.0 && u_max <= table->M() * (1.0 + kSlack), ErrorKind::domain,
          "u_max must lie in (0, M]");
  const auto u0 = initial_field(*this, grid);
  for (std::size_t c = 0; c < u0.size(); ++c) {
    const double gv = grid.is_boundary(c) ? 0.0 : g(grid.center_of(c));
    require(gv >= 0.0, ErrorKind::domain, "initial bump g must be nonnegative");
  }
  check_range(u0, lower_bound(grid), u_max, 0.0);
}

SpaceFunction tent_bump(std::array<double, 2> center, double radius, double height) {
  return [=](const std::array<double, 2>& x) {
    const double r = std::hypot(x[0] - center[0], x[1] - center[1]);
    return height * std::max(0.0, 1.0 - r / radius);
  };
}

std::vector<double> initial_field(const EpsProblem& prob, const GridSpec& grid) {
  std::vector<double> u(grid.cells());
  for (std::size_t c = 0; c < u.size(); ++c) {
    const auto x = grid.center_of(c);
    u[c] = grid.is_boundary(c) ? prob.eps * prob.psi(x) : prob.eps + prob.g(x);
  }
  return u;
}

double stable_dt(const GridSpec& grid, double max_D, double safety) {
  double h2 = grid.h(0) * grid.h(0);
  if (grid.dim == 2) h2 = std::min(h2, grid.h(1) * grid.h(1));
  return safety * h2 / (2.0 * grid.dim * max_D);
}

Field step_explicit(const Field& state, const EpsProblem& prob, const GridSpec& grid, double dt,
                    double safety, Exec exec) {
  require(state.values.size() == grid.cells(), ErrorKind::domain, "field does not match grid");
  require(dt > 0.0, ErrorKind::domain, "time step must be positive");
  std::vector<double> D(grid.cells());
  kernels::diffusivity(*prob.table, prob.eps, state.values, D, exec);
  const double bound = stable_dt(grid, max_of(D), safety);
  if (dt > bound * (1.0 + kSlack)) {
    std::ostringstream msg;
    msg << "dt = " << dt << " exceeds the stability bound " << bound;
    fail(ErrorKind::cfl, msg.str());
  }
  Field out{std::vector<double>(grid.cells()), state.time + dt};
  kernels::diffusion_update(grid, state.values, D, dt, out.values, exec);
  check_range(out.values, prob.lower_bound(grid), prob.u_max, out.time);
  return out;
}

SolveTrace solve(const EpsProblem& prob, const GridSpec& grid, std::vector<double> snapshot_times,
                 const SolveOptions& options) {
  prob.validate(grid);
  require(options.safety > 0.0 && options.safety <= 1.0, ErrorKind::domain,
          "CFL safety must lie in (0, 1]");
  if (snapshot_times.empty() || snapshot_times.back() < prob.T) snapshot_times.push_back(prob.T);
  for (std::size_t k = 0; k < snapshot_times.size(); ++k) {
    require(snapshot_times[k] >= 0.0 && snapshot_times[k] <= prob.T, ErrorKind::domain,
            "snapshot times must lie in [0, T]");
    require(k == 0 || snapshot_times[k] > snapshot_times[k - 1], ErrorKind::domain,
            "snapshot times must be strictly increasing");
  }

  const double lower = prob.lower_bound(grid);
  const double vol = grid.cell_volume();
  SolveTrace trace;
  std::vector<double> u = initial_field(prob, grid);
  for (std::size_t c = 0; c < u.size(); ++c) {
    if (grid.is_boundary(c)) {
      trace.boundary_mismatch = std::max(
          trace.boundary_mismatch, std::abs(prob.eps + prob.g(grid.center_of(c)) - u[c]));
    }
  }
  trace.energy.E0 = dirichlet_energy(grid, u);
  trace.min_u = *std::min_element(u.begin(), u.end());
  trace.max_u = max_of(u);

  std::vector<double> next(u.size()), D(u.size()), delta(u.size());
  std::size_t snap = 0;
  double t = 0.0;
  auto record = [&] {
    while (snap < snapshot_times.size() && snapshot_times[snap] <= t) {
      trace.times.push_back(snapshot_times[snap]);
      if (options.keep_snapshots) trace.snapshots.push_back(u);
      ++snap;
    }
  };
  record();

  while (snap < snapshot_times.size()) {
    kernels::diffusivity(*prob.table, prob.eps, u, D, options.exec);
    const double max_D = max_of(D);
    trace.max_D = std::max(trace.max_D, max_D);
    double dt = stable_dt(grid, max_D, options.safety);
    const double target = snapshot_times[snap];
    if (t + dt >= target) dt = target - t;

    kernels::diffusion_update(grid, u, D, dt, next, options.exec);
    check_range(next, lower, prob.u_max, t + dt);

    double diss = 0.0;
    for (std::size_t c = 0; c < u.size(); ++c) {
      const double du = next[c] - u[c];
      diss += du * du / D[c];
      delta[c] = du;
    }
    trace.energy.dissipation += diss * vol / dt;
    trace.energy.defect += dirichlet_energy(grid, delta);

    if (options.observer) options.observer(StepView{grid, t, dt, u, next, D});

    u.swap(next);
    t = (t + dt >= target) ? target : t + dt;
    ++trace.steps;
    trace.dt_history.push_back(dt);
    const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
    trace.max_u_history.push_back(*hi);
    trace.min_u = std::min(trace.min_u, *lo);
    trace.max_u = std::max(trace.max_u, *hi);
    record();
  }
  trace.energy.ET = dirichlet_energy(grid, u);
  if (!options.keep_snapshots) trace.snapshots.push_back(u);  // final field only
  return trace;
}

double energy_identity_residual(const SolveTrace& trace, const EpsProblem& prob) {
  const auto& e = trace.energy;
  return std::abs(2.0 * e.dissipation + e.ET - e.E0) / std::max(e.E0, prob.eps);
}

EpsSweep eps_sweep(const EpsProblem& prob_template, const GridSpec& grid,
                   const std::vector<double>& eps_list, const SolveOptions& options) {
  require(eps_list.size() >= 2, ErrorKind::domain, "eps sweep needs at least two values");
  for (std::size_t k = 1; k < eps_list.size(); ++k) {
    require(eps_list[k] <= eps_list[k - 1], ErrorKind::domain, "eps list must be nonincreasing");
  }
  EpsSweep out;
  out.eps = eps_list;
  SolveOptions opts = options;
  opts.keep_snapshots = false;
  for (double eps : eps_list) {
    EpsProblem prob = prob_template;
    prob.eps = eps;
    auto trace = solve(prob, grid, {prob.T}, opts);
    out.final_fields.push_back(std::move(trace.snapshots.back()));
  }
  for (std::size_t k = 1; k < out.final_fields.size(); ++k) {
    out.distances.push_back(l1_distance(grid, out.final_fields[k - 1], out.final_fields[k]));
  }
  out.decreasing = true;
  for (std::size_t k = 1; k < out.distances.size(); ++k) {
    if (!(out.distances[k] < out.distances[k - 1])) out.decreasing = false;
  }
  return out;
}

}  // namespace degenstein
