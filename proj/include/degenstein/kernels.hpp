#pragma once

#include <span>

#include "degenstein/coeffs.hpp"
#include "degenstein/grid.hpp"
#include "degenstein/parallel.hpp"

namespace degenstein::kernels {

/// D(u) = (F(u) + eps) / h(u) per cell, with u clamped into the table range.
void diffusivity(const CoefficientTable& table, double eps, std::span<const double> u,
                 std::span<double> D, Exec exec);

/// u_new = u + dt D lap_h(u) on interior cells; boundary cells copied.
void diffusion_update(const GridSpec& grid, std::span<const double> u, std::span<const double> D,
                      double dt, std::span<double> out, Exec exec);

}  // namespace degenstein::kernels
