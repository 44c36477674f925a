#include "degenstein/localization.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "degenstein/error.hpp"

namespace degenstein {

CutoffFamily CutoffFamily::make(std::array<double, 2> x0, double R, double Rp, int dim) {
  require(R > 0.0 && Rp > 0.0 && Rp < R, ErrorKind::domain, "cutoffs need 0 < R' < R");
  require(dim == 1 || dim == 2, ErrorKind::domain, "cutoff dimension must be 1 or 2");
  CutoffFamily c;
  c.x0 = x0;
  c.R = R;
  c.Rp = Rp;
  c.dim = dim;
  const double q = Rp / R;
  c.b = (2.0 - q) / (1.0 - q);
  return c;
}

double CutoffFamily::radius(int n) const {
  return R * (b - 2.0 + std::pow(b, -n)) / (b - 1.0);
}

double CutoffFamily::distance(const std::array<double, 2>& x) const {
  return dim == 2 ? std::hypot(x[0] - x0[0], x[1] - x0[1]) : std::abs(x[0] - x0[0]);
}

double CutoffFamily::theta(int n, const std::array<double, 2>& x) const {
  const double Rn = radius(n);
  const double gap = Rn - radius(n + 1);
  return std::min(1.0, std::max(0.0, Rn - distance(x)) / gap);
}

double CutoffFamily::lipschitz(int n) const { return std::pow(b, n + 1) / R; }

void CutoffFamily::check_inside(const GridSpec& grid) const {
  for (int a = 0; a < dim; ++a) {
    if (x0[a] - R < grid.lo[a] || x0[a] + R > grid.hi[a]) {
      std::ostringstream msg;
      msg << "cutoff ball of radius " << R << " around x0 leaves the grid along axis " << a;
      fail(ErrorKind::geometry, msg.str());
    }
  }
}

ExponentPack ExponentPack::make(int N, const LambdaChoice& lam, double C1,
                                const CutoffFamily& cutoffs, std::optional<double> j, double S) {
  require(N >= 1, ErrorKind::domain, "dimension must be positive");
  ExponentPack p;
  p.N = N;
  p.j = j ? *j : (N <= 2 ? 2.0 : 2.0 / (N - 2));
  require(p.j > 0.0, ErrorKind::domain, "exponent j must be positive");
  require(S > 0.0 && C1 > 0.0, ErrorKind::domain, "S and C1 must be positive");
  p.lambda = lam.lambda;
  p.Lambda = lam.Lambda;
  p.S = S;
  p.C1 = C1;
  p.C2 = 1.0;
  p.k = (2.0 - p.lambda) / (2.0 + 2.0 * p.j - p.lambda);
  p.beta = (1.0 - (1.0 + p.j) * p.k) / (p.k * p.j);
  const double b = cutoffs.b;
  p.D = std::pow(b, 4) * (2.0 * C1 * C1 + 1.0) * std::pow(p.C2, 1.0 - p.k) *
        std::pow(S, p.k * (1.0 + p.j)) / (cutoffs.R * cutoffs.R);
  return p;
}

double ExponentPack::threshold(double b) const { return lady_threshold(D, b * b, delta()); }

double lady_threshold(double c, double b, double delta) {
  require(c > 0.0 && delta > 0.0 && b >= 1.0, ErrorKind::domain,
          "iteration lemma needs c, delta > 0 and b >= 1");
  return std::exp(-std::log(c) / delta - std::log(b) / (delta * delta));
}

double lady_bound(double c, double b, double delta, double y0, int n) {
  require(c > 0.0 && delta > 0.0 && b >= 1.0 && y0 >= 0.0 && n >= 0, ErrorKind::domain,
          "iteration lemma needs c, delta > 0, b >= 1, y0 >= 0");
  if (y0 == 0.0) return 0.0;
  const double q = std::pow(1.0 + delta, n);
  const double log_bound = (q - 1.0) / delta * std::log(c) +
                           ((q - 1.0) / (delta * delta) - n / delta) * std::log(b) +
                           q * std::log(y0);
  return std::exp(log_bound);
}

EnergySamples energy_samples(const SolveTrace& trace, const GridSpec& grid,
                             const CutoffFamily& cutoffs, const CoefficientTable& table,
                             int n_max) {
  require(n_max >= 0, ErrorKind::domain, "n_max must be nonnegative");
  require(trace.snapshots.size() == trace.times.size() && !trace.times.empty(), ErrorKind::domain,
          "energy needs stored snapshots");
  cutoffs.check_inside(grid);
  const std::size_t cells = grid.cells();
  const double vol = grid.cell_volume();
  const int nx = grid.n[0];
  const int ny = grid.dim == 2 ? grid.n[1] : 1;

  // theta_n per cell, restricted to cells inside B_0
  std::vector<std::size_t> ball;
  for (std::size_t c = 0; c < cells; ++c) {
    if (cutoffs.distance(grid.center_of(c)) < cutoffs.R) ball.push_back(c);
  }
  std::vector<std::vector<double>> theta(static_cast<std::size_t>(n_max) + 1,
                                         std::vector<double>(cells, 0.0));
  for (int n = 0; n <= n_max; ++n) {
    for (std::size_t c : ball) theta[n][c] = cutoffs.theta(n, grid.center_of(c));
  }

  EnergySamples out;
  out.times = trace.times;
  out.S.assign(static_cast<std::size_t>(n_max) + 1, std::vector<double>(trace.times.size(), 0.0));
  out.Q = out.S;
  std::vector<double> H(cells), G(cells), w(cells);
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    const auto& u = trace.snapshots[k];
    for (std::size_t c = 0; c < cells; ++c) {
      H[c] = table.eval_clamped(Column::H, u[c]);
      G[c] = table.eval_clamped(Column::G, u[c]);
    }
    for (int n = 0; n <= n_max; ++n) {
      const auto& th = theta[n];
      double s = 0.0;
      for (std::size_t c : ball) s += th[c] * th[c] * H[c];
      out.S[n][k] = s * vol;

      for (std::size_t c = 0; c < cells; ++c) w[c] = th[c] * G[c];
      double q = 0.0;
      for (int jy = 0; jy < ny; ++jy) {
        for (int ix = 0; ix < nx; ++ix) {
          const std::size_t c = static_cast<std::size_t>(jy) * nx + ix;
          double g2 = 0.0;
          if (ix > 0 && ix + 1 < nx) {
            const double d = (w[c + 1] - w[c - 1]) / (2.0 * grid.h(0));
            g2 += d * d;
          }
          if (grid.dim == 2 && jy > 0 && jy + 1 < ny) {
            const double d = (w[c + nx] - w[c - nx]) / (2.0 * grid.h(1));
            g2 += d * d;
          }
          q += g2;
        }
      }
      out.Q[n][k] = q * vol;
    }
  }
  return out;
}

double energy_Y(const EnergySamples& samples, const ExponentPack& pack, int n, double T_prime) {
  require(n >= 0 && static_cast<std::size_t>(n) < samples.S.size(), ErrorKind::domain,
          "cutoff index outside the sampled range");
  require(T_prime >= 0.0, ErrorKind::domain, "T' must be nonnegative");
  const auto& t = samples.times;
  const auto& S = samples.S[n];
  const auto& Q = samples.Q[n];
  if (T_prime == 0.0) return 0.0;
  double sup = 0.0, integral = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] > T_prime) {
      if (k > 0) {
        const double a = (T_prime - t[k - 1]) / (t[k] - t[k - 1]);
        const double S_end = S[k - 1] + a * (S[k] - S[k - 1]);
        const double Q_end = Q[k - 1] + a * (Q[k] - Q[k - 1]);
        sup = std::max(sup, S_end);
        integral += 0.5 * (Q[k - 1] + Q_end) * (T_prime - t[k - 1]);
      } else {
        sup = std::max(sup, S[0]);
        integral += Q[0] * T_prime;
      }
      break;
    }
    sup = std::max(sup, S[k]);
    if (k > 0) integral += 0.5 * (Q[k - 1] + Q[k]) * (t[k] - t[k - 1]);
    else integral += Q[0] * t[0];  // constant extension back to 0
  }
  return std::pow(T_prime, pack.beta) * (sup + integral);
}

double energy_Y(const SolveTrace& trace, const GridSpec& grid, const CutoffFamily& cutoffs,
                const ExponentPack& pack, const CoefficientTable& table, int n, double T_prime) {
  return energy_Y(energy_samples(trace, grid, cutoffs, table, n), pack, n, T_prime);
}

double estimate_T_prime(const EnergySamples& samples, const ExponentPack& pack, double b) {
  const double T = samples.times.back();
  const double threshold = pack.threshold(b);
  if (energy_Y(samples, pack, 0, T) <= threshold) return T;
  // Y_0 is nondecreasing in T': bisect on a log scale down to 1e-300
  double lo = 0.0, hi = T;
  double probe = T;
  while (probe > 1e-300 && energy_Y(samples, pack, 0, probe) > threshold) {
    hi = probe;
    probe *= 1e-3;
  }
  if (probe <= 1e-300) return 0.0;
  lo = probe;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (energy_Y(samples, pack, 0, mid) <= threshold) lo = mid;
    else hi = mid;
  }
  return lo;
}

double estimate_T_prime(const SolveTrace& trace, const GridSpec& grid, const CutoffFamily& cutoffs,
                        const ExponentPack& pack, const CoefficientTable& table) {
  return estimate_T_prime(energy_samples(trace, grid, cutoffs, table, 0), pack, cutoffs.b);
}

DeGiorgiTrace de_giorgi(const SolveTrace& trace, const GridSpec& grid, const CutoffFamily& cutoffs,
                        const ExponentPack& pack, const CoefficientTable& table, int n_max,
                        std::optional<double> T_eval, double slack) {
  const auto samples = energy_samples(trace, grid, cutoffs, table, n_max);
  DeGiorgiTrace out;
  out.slack = slack;
  out.T_eval = T_eval ? *T_eval : samples.times.back();
  out.threshold = pack.threshold(cutoffs.b);
  out.T_prime = estimate_T_prime(samples, pack, cutoffs.b);
  out.inequality_holds = true;
  out.nonincreasing = true;
  for (int n = 0; n <= n_max; ++n) {
    out.Y.push_back(energy_Y(samples, pack, n, out.T_eval));
    if (n == 0) {
      out.bound.push_back(out.Y[0]);
      continue;
    }
    const double bound = pack.D * std::pow(cutoffs.b, 2.0 * (n - 1)) *
                         std::pow(out.Y[n - 1], 1.0 + pack.delta());
    out.bound.push_back(bound);
    if (out.Y[n] > slack * bound) out.inequality_holds = false;
    if (n >= 2 && out.Y[n] > out.Y[n - 1]) out.nonincreasing = false;
  }
  out.below_threshold = out.Y[0] <= out.threshold;
  return out;
}

FrontRadius front_radius(const GridSpec& grid, std::span<const double> u,
                         const std::array<double, 2>& x0, double eps, double tol_support) {
  FrontRadius r;
  const double level = eps + tol_support;
  for (std::size_t c = 0; c < u.size(); ++c) {
    if (u[c] > level) {
      const auto x = grid.center_of(c);
      const double d = grid.dim == 2 ? std::hypot(x[0] - x0[0], x[1] - x0[1])
                                     : std::abs(x[0] - x0[0]);
      r.r_front = std::max(r.r_front, d);
      r.r_empty = std::min(r.r_empty, d);
    }
  }
  return r;
}

SupportMonitor::SupportMonitor(const GridSpec& grid, std::array<double, 2> x0, double Rp,
                               double eps, double tol_support, double sample_dt)
    : grid_(grid), x0_(x0), Rp_(Rp), threshold_(eps + tol_support), eps_(eps), tol_(tol_support),
      sample_dt_(sample_dt) {
  for (std::size_t c = 0; c < grid.cells(); ++c) {
    const auto x = grid.center_of(c);
    const double d = grid.dim == 2 ? std::hypot(x[0] - x0[0], x[1] - x0[1]) : std::abs(x[0] - x0[0]);
    if (d <= Rp) inner_.push_back(c);
  }
}

void SupportMonitor::record(double t, std::span<const double> u) {
  const auto r = front_radius(grid_, u, x0_, eps_, tol_);
  samples_.push_back({t, r.r_front, r.r_empty});
}

void SupportMonitor::operator()(const StepView& step) {
  const double t = step.t_old + step.dt;
  const auto u = step.u_new;
  if (samples_.empty()) {
    record(step.t_old, step.u_old);
    next_sample_ = step.t_old + sample_dt_;
  }
  if (!arrival_) {
    for (std::size_t c : inner_) {
      if (u[c] > threshold_) {
        arrival_ = t;
        break;
      }
    }
  }
  bool all = true;
  for (std::size_t c = 0; c < u.size() && all; ++c) {
    if (!grid_.is_boundary(c) && !(u[c] > threshold_)) all = false;
  }
  if (all && !all_interior_) all_interior_ = t;
  if (!all && all_interior_) persisted_ = false;
  if (t >= next_sample_ * (1.0 - 1e-12)) {
    record(t, u);
    next_sample_ += sample_dt_;
    if (next_sample_ <= t) next_sample_ = t + sample_dt_;
  }
}

}  // namespace degenstein
