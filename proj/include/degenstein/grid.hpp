#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace degenstein {

/// Cell-centered box grid in 1 or 2 dimensions. Cell (i, j) has index
/// j * n[0] + i and center (lo[0] + (i + 1/2) h[0], lo[1] + (j + 1/2) h[1]).
struct GridSpec {
  int dim = 1;
  std::array<double, 2> lo{-1.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};
  std::array<int, 2> n{16, 1};

  static GridSpec line(double a, double b, int n);
  static GridSpec box(double ax, double bx, double ay, double by, int nx, int ny);

  /// n >= 16 per used axis, hi > lo; domain error otherwise.
  void validate() const;

  double h(int axis) const { return (hi[axis] - lo[axis]) / n[axis]; }
  std::size_t cells() const {
    return static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(dim == 2 ? n[1] : 1);
  }
  double cell_volume() const { return dim == 2 ? h(0) * h(1) : h(0); }
  double center(int axis, int i) const { return lo[axis] + (i + 0.5) * h(axis); }
  std::array<double, 2> center_of(std::size_t cell) const;
  /// Outermost layer of cells, pinned by the Dirichlet data.
  bool is_boundary(std::size_t cell) const;
  double volume() const { return cell_volume() * static_cast<double>(cells()); }

  /// Same box with every used axis refined by `factor`.
  GridSpec refined(int factor) const;
};

using SpaceFunction = std::function<double(const std::array<double, 2>&)>;

/// Concentration per cell at a time.
struct Field {
  std::vector<double> values;
  double time = 0.0;
};

std::vector<double> sample(const GridSpec& grid, const SpaceFunction& f);

/// Average of a field on `fine` (a refinement of `coarse` by an integer
/// factor) over each coarse cell.
std::vector<double> restrict_to(const GridSpec& coarse, const GridSpec& fine,
                                std::span<const double> values);

/// sum |a - b| * cell volume.
double l1_distance(const GridSpec& grid, std::span<const double> a, std::span<const double> b);

/// sum over faces of ((u_right - u_left) / h)^2 * cell volume, the discrete
/// Dirichlet energy paired with the 3/5-point Laplacian.
double dirichlet_energy(const GridSpec& grid, std::span<const double> u);

}  // namespace degenstein
