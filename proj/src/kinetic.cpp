#include "degenstein/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "degenstein/error.hpp"

namespace degenstein {

namespace {

constexpr double kGaussianCut = 4.0;
const double kTriangularHalfWidth = std::sqrt(6.0);

// single mirror about the outer faces; offsets are capped below n so one
// reflection always lands inside
inline int reflect(int i, int n) {
  if (i < 0) return -1 - i;
  if (i >= n) return 2 * n - 1 - i;
  return i;
}

struct CellJump {
  double f = 0.0;       // dt / tau
  int kernel = -1;      // index into the per-step kernel list, -1 = no jump
};

struct StepSetup {
  std::vector<CellJump> cells;
  std::vector<DiscreteKernel> kernels;
  std::array<int, 2> max_reach{0, 0};
};

StepSetup prepare(std::span<const double> u, const GridSpec& grid, const JumpModel& model,
                  double dt) {
  StepSetup s;
  s.cells.resize(u.size());
  // cells share a kernel whenever sigma agrees exactly
  std::unordered_map<double, int> known;
  for (std::size_t c = 0; c < u.size(); ++c) {
    if (!(u[c] > 0.0)) continue;
    const double f = dt / model.tau(u[c]);
    if (!(f > 0.0)) continue;
    const double sigma = std::sqrt(model.sigma2(u[c]));
    int idx = -1;
    if (auto it = known.find(sigma); it != known.end()) {
      idx = it->second;
    } else {
      s.kernels.emplace_back(model.shape, sigma, grid);
      idx = static_cast<int>(s.kernels.size()) - 1;
      known.emplace(sigma, idx);
      for (int a = 0; a < 2; ++a) s.max_reach[a] = std::max(s.max_reach[a], s.kernels.back().reach(a));
    }
    if (s.kernels[idx].identity()) continue;
    s.cells[c] = {f, idx};
  }
  return s;
}

inline double gather_at(const GridSpec& grid, const StepSetup& s, const double* u, std::size_t c) {
  const CellJump& cj = s.cells[c];
  if (cj.kernel < 0) return u[c];
  const DiscreteKernel& K = s.kernels[cj.kernel];
  const int nx = grid.n[0];
  const int ny = grid.dim == 2 ? grid.n[1] : 1;
  const int i = static_cast<int>(c % static_cast<std::size_t>(nx));
  const int j = static_cast<int>(c / static_cast<std::size_t>(nx));
  double acc = 0.0;
  for (int b = -K.reach(1); b <= K.reach(1); ++b) {
    const int jj = reflect(j + b, ny);
    for (int a = -K.reach(0); a <= K.reach(0); ++a) {
      const double w = K.weight(a, b);
      if (w == 0.0) continue;
      acc += w * u[static_cast<std::size_t>(jj) * nx + reflect(i + a, nx)];
    }
  }
  return (1.0 - cj.f) * u[c] + cj.f * acc;
}

inline double scatter_at(const GridSpec& grid, const StepSetup& s, const double* u, std::size_t c) {
  const int nx = grid.n[0];
  const int ny = grid.dim == 2 ? grid.n[1] : 1;
  const int i = static_cast<int>(c % static_cast<std::size_t>(nx));
  const int j = static_cast<int>(c / static_cast<std::size_t>(nx));
  const CellJump& self = s.cells[c];
  double out = (1.0 - self.f) * u[c];
  if (self.kernel < 0) out = u[c];
  // a jump from x by k lands on (i, j) when x + k is (i, j) or one of its mirror images
  const std::array<int, 3> img_x{i, -1 - i, 2 * nx - 1 - i};
  const std::array<int, 3> img_y{j, -1 - j, 2 * ny - 1 - j};
  const int ry = s.max_reach[1];
  const int rx = s.max_reach[0];
  const int images_y = grid.dim == 2 ? 3 : 1;
  for (int my = 0; my < images_y; ++my) {
    const int py = img_y[my];
    for (int mx = 0; mx < 3; ++mx) {
      const int px = img_x[mx];
      for (int b = -ry; b <= ry; ++b) {
        const int sy = py - b;
        if (sy < 0 || sy >= ny) continue;
        for (int a = -rx; a <= rx; ++a) {
          const int sx = px - a;
          if (sx < 0 || sx >= nx) continue;
          const std::size_t src = static_cast<std::size_t>(sy) * nx + sx;
          const CellJump& cj = s.cells[src];
          if (cj.kernel < 0) continue;
          const DiscreteKernel& K = s.kernels[cj.kernel];
          if (std::abs(a) > K.reach(0) || std::abs(b) > K.reach(1)) continue;
          out += cj.f * u[src] * K.weight(a, b);
        }
      }
    }
  }
  return out;
}

}  // namespace

JumpModel JumpModel::power_law(double beta, double tau0, double a, KernelShape shape) {
  return from_profile(DegeneracyProfile::power(beta), tau0, a, shape);
}

JumpModel JumpModel::from_profile(const DegeneracyProfile& profile, double tau0, double a,
                                  KernelShape shape) {
  require(tau0 > 0.0, ErrorKind::domain, "tau0 must be positive");
  require(a >= 0.0, ErrorKind::domain, "waiting-time exponent a must be nonnegative");
  JumpModel m;
  m.tau = [tau0, a](double u) { return tau0 * std::pow(u, -a); };
  m.P = profile.P;
  m.shape = shape;
  return m;
}

double JumpModel::support_radius(double u) const {
  const double sigma = std::sqrt(sigma2(u));
  return shape == KernelShape::gaussian_truncated ? kGaussianCut * sigma
                                                  : kTriangularHalfWidth * sigma;
}

DiscreteKernel::DiscreteKernel(KernelShape shape, double sigma, const GridSpec& grid)
    : shape_(shape), sigma_(sigma), dim_(grid.dim), h_{grid.h(0), grid.dim == 2 ? grid.h(1) : 1.0} {
  require(sigma >= 0.0 && std::isfinite(sigma), ErrorKind::domain, "kernel width must be finite");
  radius_ = shape == KernelShape::gaussian_truncated ? kGaussianCut * sigma
                                                     : kTriangularHalfWidth * sigma;
  for (int a = 0; a < dim_; ++a) {
    const int n = grid.n[a];
    const double cells = std::floor(radius_ / h_[a]);
    reach_[a] = static_cast<int>(std::min<double>(cells, n - 1));
  }
  for (int a = 0; a < 2; ++a) {
    axis_[a].assign(2 * reach_[a] + 1, 1.0);
    if (a >= dim_ || sigma_ == 0.0) continue;
    for (int k = -reach_[a]; k <= reach_[a]; ++k) {
      const double x = k * h_[a];
      axis_[a][k + reach_[a]] = shape_ == KernelShape::gaussian_truncated
                                    ? std::exp(-0.5 * x * x / (sigma_ * sigma_))
                                    : std::max(0.0, 1.0 - std::abs(x) / radius_);
    }
  }
  double total = 0.0;
  for (int b = -reach_[1]; b <= reach_[1]; ++b) {
    for (int a = -reach_[0]; a <= reach_[0]; ++a) total += raw(a, b);
  }
  norm_ = total > 0.0 ? 1.0 / total : 1.0;
}

double DiscreteKernel::raw(int k0, int k1) const {
  if (sigma_ == 0.0) return (k0 == 0 && k1 == 0) ? 1.0 : 0.0;
  if (shape_ == KernelShape::gaussian_truncated && dim_ == 2) {
    // radial truncation of the otherwise separable gaussian
    const double x = k0 * h_[0], y = k1 * h_[1];
    if (x * x + y * y > radius_ * radius_) return 0.0;
  }
  return axis_[0][k0 + reach_[0]] * axis_[1][k1 + reach_[1]];
}

double DiscreteKernel::weight(int k0, int k1) const {
  if (std::abs(k0) > reach_[0] || std::abs(k1) > reach_[1]) return 0.0;
  return raw(k0, k1) * norm_;
}

KernelMoments kernel_moments(const JumpModel& model, double u, const GridSpec& grid) {
  require(u > 0.0, ErrorKind::domain, "kernel moments need u > 0");
  const double sigma = std::sqrt(model.sigma2(u));
  if (sigma < grid.h(0)) {
    std::ostringstream msg;
    msg << "jump width sigma = " << sigma << " is below the grid spacing " << grid.h(0);
    fail(ErrorKind::resolution, msg.str());
  }
  const DiscreteKernel K(model.shape, sigma, grid);
  KernelMoments m;
  const double h = grid.h(0);
  for (int b = -K.reach(1); b <= K.reach(1); ++b) {
    m.mass += K.weight(0, b);
    for (int a = 1; a <= K.reach(0); ++a) {
      const double wp = K.weight(a, b), wm = K.weight(-a, b);
      m.mass += wp + wm;
      m.mean += a * h * (wp - wm);  // symmetric pairs cancel exactly
      m.variance += (a * h) * (a * h) * (wp + wm);
    }
  }
  return m;
}

SinkTerm SinkTerm::none() { return {}; }

SinkTerm SinkTerm::linear(double rate) {
  require(rate >= 0.0, ErrorKind::domain, "absorption rate must be nonnegative");
  return {[rate](const std::array<double, 2>&, double u) { return -rate * u; }};
}

double min_waiting_time(const JumpModel& model, std::span<const double> u) {
  double t = std::numeric_limits<double>::infinity();
  for (double v : u) {
    if (v > 0.0) t = std::min(t, model.tau(v));
  }
  return t;
}

Field master_step(const Field& density, const GridSpec& grid, const JumpModel& model,
                  const SinkTerm& sink, double dt, MasterForm form, Exec exec) {
  const auto& u = density.values;
  require(u.size() == grid.cells(), ErrorKind::domain, "density does not match grid");
  require(dt > 0.0, ErrorKind::domain, "time step must be positive");
  for (double v : u) require(v >= 0.0, ErrorKind::negativity, "density must be nonnegative");
  const double tau_min = min_waiting_time(model, u);
  if (dt > tau_min * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "dt = " << dt << " exceeds the shortest waiting time " << tau_min;
    fail(ErrorKind::step, msg.str());
  }
  const StepSetup setup = prepare(u, grid, model, dt);
  Field out{std::vector<double>(u.size()), density.time + dt};
  const auto n = static_cast<std::ptrdiff_t>(u.size());
  const double* pu = u.data();
  double* po = out.values.data();
  auto body = [&](std::ptrdiff_t c) {
    const auto cell = static_cast<std::size_t>(c);
    po[c] = form == MasterForm::gather ? gather_at(grid, setup, pu, cell)
                                       : scatter_at(grid, setup, pu, cell);
  };
  if (exec == Exec::parallel) {
    thread_limit();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < n; ++c) body(c);
  } else {
    for (std::ptrdiff_t c = 0; c < n; ++c) body(c);
  }
  if (sink.active()) {
    for (std::size_t c = 0; c < u.size(); ++c) {
      const double m = sink.m(grid.center_of(c), out.values[c]);
      require(m <= 0.0, ErrorKind::domain, "sink term must be nonpositive");
      out.values[c] = std::max(0.0, out.values[c] + dt * m);
    }
  }
  for (double v : out.values) {
    if (v < 0.0) fail(ErrorKind::negativity, "redistribution produced a negative density");
  }
  return out;
}

KineticRun run_kinetic(std::vector<double> initial, const GridSpec& grid, const JumpModel& model,
                       const SinkTerm& sink, double T, double dt_fraction, MasterForm form,
                       Exec exec) {
  require(T > 0.0, ErrorKind::domain, "final time must be positive");
  require(dt_fraction > 0.0 && dt_fraction <= 1.0, ErrorKind::domain,
          "dt fraction must lie in (0, 1]");
  KineticRun run;
  const double tau_min = min_waiting_time(model, initial);
  run.dt = std::isfinite(tau_min) ? std::min(T, dt_fraction * tau_min) : T;
  Field state{std::move(initial), 0.0};
  run.mass_history.push_back(total_mass(grid, state.values));
  while (state.time < T) {
    const double dt = std::min(run.dt, T - state.time);
    const double t_next = state.time + dt >= T ? T : state.time + dt;
    state = master_step(state, grid, model, sink, dt, form, exec);
    state.time = t_next;
    ++run.steps;
    run.mass_history.push_back(total_mass(grid, state.values));
  }
  run.final_field = std::move(state.values);
  return run;
}

double total_mass(const GridSpec& grid, std::span<const double> u) {
  double m = 0.0;
  for (double v : u) m += v;
  return m * grid.cell_volume();
}

}  // namespace degenstein
