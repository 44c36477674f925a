#include "degenstein/grid.hpp"

#include <cmath>
#include <string>

#include "degenstein/error.hpp"

namespace degenstein {

GridSpec GridSpec::line(double a, double b, int n) {
  GridSpec g;
  g.dim = 1;
  g.lo = {a, 0.0};
  g.hi = {b, 1.0};
  g.n = {n, 1};
  g.validate();
  return g;
}

GridSpec GridSpec::box(double ax, double bx, double ay, double by, int nx, int ny) {
  GridSpec g;
  g.dim = 2;
  g.lo = {ax, ay};
  g.hi = {bx, by};
  g.n = {nx, ny};
  g.validate();
  return g;
}

void GridSpec::validate() const {
  require(dim == 1 || dim == 2, ErrorKind::domain, "grid dimension must be 1 or 2");
  for (int a = 0; a < dim; ++a) {
    require(n[a] >= 16, ErrorKind::domain, "grid needs at least 16 cells per axis");
    require(hi[a] > lo[a], ErrorKind::domain, "grid extent must be a nonempty interval");
  }
}

std::array<double, 2> GridSpec::center_of(std::size_t cell) const {
  const int i = static_cast<int>(cell % static_cast<std::size_t>(n[0]));
  const int j = static_cast<int>(cell / static_cast<std::size_t>(n[0]));
  return {center(0, i), dim == 2 ? center(1, j) : 0.0};
}

bool GridSpec::is_boundary(std::size_t cell) const {
  const int i = static_cast<int>(cell % static_cast<std::size_t>(n[0]));
  if (i == 0 || i == n[0] - 1) return true;
  if (dim == 1) return false;
  const int j = static_cast<int>(cell / static_cast<std::size_t>(n[0]));
  return j == 0 || j == n[1] - 1;
}

GridSpec GridSpec::refined(int factor) const {
  require(factor >= 1, ErrorKind::domain, "refinement factor must be >= 1");
  GridSpec g = *this;
  g.n[0] *= factor;
  if (dim == 2) g.n[1] *= factor;
  return g;
}

std::vector<double> sample(const GridSpec& grid, const SpaceFunction& f) {
  std::vector<double> v(grid.cells());
  for (std::size_t c = 0; c < v.size(); ++c) v[c] = f(grid.center_of(c));
  return v;
}

std::vector<double> restrict_to(const GridSpec& coarse, const GridSpec& fine,
                                std::span<const double> values) {
  require(coarse.dim == fine.dim && values.size() == fine.cells(), ErrorKind::domain,
          "restrict_to: grid mismatch");
  const int r = fine.n[0] / coarse.n[0];
  const int ry = coarse.dim == 2 ? fine.n[1] / coarse.n[1] : 1;
  const bool integer_x = r >= 1 && r * coarse.n[0] == fine.n[0];
  const bool integer_y = coarse.dim == 1 || (ry == r && ry * coarse.n[1] == fine.n[1]);
  require(integer_x && integer_y, ErrorKind::domain,
          "restrict_to: fine grid is not an integer refinement");
  std::vector<double> out(coarse.cells(), 0.0);
  const int ny = coarse.dim == 2 ? coarse.n[1] : 1;
  const double w = 1.0 / (static_cast<double>(r) * ry);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < coarse.n[0]; ++i) {
      double sum = 0.0;
      for (int b = 0; b < ry; ++b) {
        for (int a = 0; a < r; ++a) {
          sum += values[static_cast<std::size_t>(j * ry + b) * fine.n[0] + i * r + a];
        }
      }
      out[static_cast<std::size_t>(j) * coarse.n[0] + i] = w * sum;
    }
  }
  return out;
}

double l1_distance(const GridSpec& grid, std::span<const double> a, std::span<const double> b) {
  require(a.size() == grid.cells() && b.size() == grid.cells(), ErrorKind::domain,
          "l1_distance: size mismatch");
  double sum = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) sum += std::abs(a[c] - b[c]);
  return sum * grid.cell_volume();
}

double dirichlet_energy(const GridSpec& grid, std::span<const double> u) {
  const int nx = grid.n[0];
  const int ny = grid.dim == 2 ? grid.n[1] : 1;
  const double hx = grid.h(0);
  double sum = 0.0;
  for (int j = 0; j < ny; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * nx;
    for (int i = 0; i + 1 < nx; ++i) {
      const double d = (u[row + i + 1] - u[row + i]) / hx;
      sum += d * d;
    }
  }
  if (grid.dim == 2) {
    const double hy = grid.h(1);
    for (int j = 0; j + 1 < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const double d = (u[static_cast<std::size_t>(j + 1) * nx + i] -
                          u[static_cast<std::size_t>(j) * nx + i]) / hy;
        sum += d * d;
      }
    }
  }
  return sum * grid.cell_volume();
}

}  // namespace degenstein
