#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace convexburgers {

/// Space-time grid on [0, T] x torus.
///
/// Node fields (the dual variable W) live at (t_k, x_i), k = 0..nt,
/// i = 0..n-1, stored row-major as values[k * n + i]. Cell fields (rho, q)
/// live on the boxes [t_k, t_{k+1}] x [x_i, x_{i+1}], k = 0..nt-1, stored as
/// values[k * n + i]. Every box difference is centered at the box midpoint.
struct SpaceTimeGrid {
  std::size_t n;
  std::size_t nt;
  double T;

  SpaceTimeGrid(std::size_t n_cells, std::size_t n_steps, double horizon);

  double dx() const { return 1.0 / static_cast<double>(n); }
  double dt() const { return T / static_cast<double>(nt); }
  double time(std::size_t k) const { return static_cast<double>(k) * dt(); }
  std::size_t node_count() const { return (nt + 1) * n; }
  std::size_t cell_count() const { return nt * n; }
  /// Quadrature weight of one cell.
  double cell_volume() const { return dx() * dt(); }
};

namespace staggered {

/// Box time difference: x-average over the two cell corners of (W_{k+1} - W_k) / dt.
void time_difference(const SpaceTimeGrid& g, std::span<const double> w, std::span<double> out);

/// Box space difference: t-average over the two cell corners of (W_{i+1} - W_i) / dx.
void space_difference(const SpaceTimeGrid& g, std::span<const double> w, std::span<double> out);

/// Adjoints (with respect to the plain Euclidean products) of the two box
/// differences. Results are accumulated into node fields, including row nt.
void time_difference_adjoint(const SpaceTimeGrid& g, std::span<const double> cells, std::span<double> out);
void space_difference_adjoint(const SpaceTimeGrid& g, std::span<const double> cells, std::span<double> out);

/// Average of node samples of u0 onto the cell midpoints x_{i+1/2}.
std::vector<double> to_cell_midpoints(std::span<const double> node_values);

/// Direct solver for (A^T A + B^T B) W = f, A and B the box time and space
/// differences, with W pinned to zero on row nt.
///
/// Both operators are tensor products of 1-D stencils, so a real FFT in x
/// diagonalizes them and leaves one symmetric tridiagonal system in t per
/// Fourier mode, solved by a prefactored Thomas sweep.
class NormalEquationSolver {
 public:
  explicit NormalEquationSolver(const SpaceTimeGrid& g);
  ~NormalEquationSolver();
  NormalEquationSolver(const NormalEquationSolver&) = delete;
  NormalEquationSolver& operator=(const NormalEquationSolver&) = delete;

  /// rhs and w are node fields; row nt of rhs is ignored, row nt of w is set to 0.
  void solve(std::span<const double> rhs, std::span<double> w);

  /// (A^T A + B^T B) w on rows 0..nt-1; row nt of out is set to 0.
  void apply(std::span<const double> w, std::span<double> out) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace staggered
}  // namespace convexburgers
