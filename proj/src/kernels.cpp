#include "degenstein/kernels.hpp"

#include <cstddef>

namespace degenstein::kernels {

namespace {

inline double diffusivity_at(const CoefficientTable& table, double eps, double u) {
  return (table.eval_clamped(Column::F, u) + eps) / table.eval_clamped(Column::h, u);
}

struct Stencil {
  int nx, ny, dim;
  double inv_hx2, inv_hy2;
};

inline double update_at(const Stencil& st, const double* u, const double* D, double dt,
                        std::size_t c) {
  const int i = static_cast<int>(c % static_cast<std::size_t>(st.nx));
  const int j = static_cast<int>(c / static_cast<std::size_t>(st.nx));
  if (i == 0 || i == st.nx - 1) return u[c];
  double lap = (u[c - 1] + u[c + 1] - 2.0 * u[c]) * st.inv_hx2;
  if (st.dim == 2) {
    if (j == 0 || j == st.ny - 1) return u[c];
    lap += (u[c - st.nx] + u[c + st.nx] - 2.0 * u[c]) * st.inv_hy2;
  }
  return u[c] + dt * D[c] * lap;
}

}  // namespace

void diffusivity(const CoefficientTable& table, double eps, std::span<const double> u,
                 std::span<double> D, Exec exec) {
  const auto n = static_cast<std::ptrdiff_t>(u.size());
  if (exec == Exec::parallel) {
    thread_limit();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < n; ++c) D[c] = diffusivity_at(table, eps, u[c]);
  } else {
    for (std::ptrdiff_t c = 0; c < n; ++c) D[c] = diffusivity_at(table, eps, u[c]);
  }
}

void diffusion_update(const GridSpec& grid, std::span<const double> u, std::span<const double> D,
                      double dt, std::span<double> out, Exec exec) {
  const Stencil st{grid.n[0], grid.dim == 2 ? grid.n[1] : 1, grid.dim,
                   1.0 / (grid.h(0) * grid.h(0)),
                   grid.dim == 2 ? 1.0 / (grid.h(1) * grid.h(1)) : 0.0};
  const auto n = static_cast<std::ptrdiff_t>(u.size());
  const double* pu = u.data();
  const double* pD = D.data();
  double* po = out.data();
  if (exec == Exec::parallel) {
    thread_limit();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < n; ++c) po[c] = update_at(st, pu, pD, dt, static_cast<std::size_t>(c));
  } else {
    for (std::ptrdiff_t c = 0; c < n; ++c) po[c] = update_at(st, pu, pD, dt, static_cast<std::size_t>(c));
  }
}

}  // namespace degenstein::kernels
