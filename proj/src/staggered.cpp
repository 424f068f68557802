#include "convexburgers/staggered.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "convexburgers/errors.hpp"

namespace convexburgers {

SpaceTimeGrid::SpaceTimeGrid(std::size_t n_cells, std::size_t n_steps, double horizon)
    : n(n_cells), nt(n_steps), T(horizon) {
  if (n < 4 || nt < 4) {
    throw InvalidArgument("SpaceTimeGrid: n and nt must be >= 4, got " + std::to_string(n) + " x " +
                          std::to_string(nt));
  }
  if (!(T > 0.0)) throw InvalidTime("SpaceTimeGrid: horizon must be positive");
}

namespace staggered {

void time_difference(const SpaceTimeGrid& g, std::span<const double> w, std::span<double> out) {
  const std::size_t n = g.n;
  const double s = 0.5 / g.dt();
  for (std::size_t k = 0; k < g.nt; ++k) {
    const double* lo = w.data() + k * n;
    const double* hi = lo + n;
    double* o = out.data() + k * n;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = (i + 1 == n) ? 0 : i + 1;
      o[i] = s * ((hi[i] - lo[i]) + (hi[j] - lo[j]));
    }
  }
}

void space_difference(const SpaceTimeGrid& g, std::span<const double> w, std::span<double> out) {
  const std::size_t n = g.n;
  const double s = 0.5 / g.dx();
  for (std::size_t k = 0; k < g.nt; ++k) {
    const double* lo = w.data() + k * n;
    const double* hi = lo + n;
    double* o = out.data() + k * n;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = (i + 1 == n) ? 0 : i + 1;
      o[i] = s * ((lo[j] - lo[i]) + (hi[j] - hi[i]));
    }
  }
}

void time_difference_adjoint(const SpaceTimeGrid& g, std::span<const double> cells, std::span<double> out) {
  const std::size_t n = g.n;
  const double s = 0.5 / g.dt();
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < g.nt; ++k) {
    const double* c = cells.data() + k * n;
    double* lo = out.data() + k * n;
    double* hi = lo + n;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = (i + 1 == n) ? 0 : i + 1;
      const double v = s * c[i];
      hi[i] += v;
      hi[j] += v;
      lo[i] -= v;
      lo[j] -= v;
    }
  }
}

void space_difference_adjoint(const SpaceTimeGrid& g, std::span<const double> cells, std::span<double> out) {
  const std::size_t n = g.n;
  const double s = 0.5 / g.dx();
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < g.nt; ++k) {
    const double* c = cells.data() + k * n;
    double* lo = out.data() + k * n;
    double* hi = lo + n;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = (i + 1 == n) ? 0 : i + 1;
      const double v = s * c[i];
      lo[j] += v;
      lo[i] -= v;
      hi[j] += v;
      hi[i] -= v;
    }
  }
}

std::vector<double> to_cell_midpoints(std::span<const double> node_values) {
  const std::size_t n = node_values.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (node_values[i] + node_values[(i + 1) % n]);
  return out;
}

struct NormalEquationSolver::Impl {
  SpaceTimeGrid grid;
  std::size_t modes;
  // Per mode j: off-diagonal b_j, Thomas multipliers cp and 1/denominator.
  std::vector<double> off;
  std::vector<double> cp;
  std::vector<double> inv_den;
  double* real_buf = nullptr;
  fftw_complex* spec_buf = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Impl(const SpaceTimeGrid& g) : grid(g), modes(g.n / 2 + 1) {
    const std::size_t nt = g.nt;
    const double idt2 = 1.0 / (g.dt() * g.dt());
    const double h = g.dx();
    off.resize(modes);
    cp.resize(modes * nt);
    inv_den.resize(modes * nt);
    for (std::size_t j = 0; j < modes; ++j) {
      const double angle = std::numbers::pi * static_cast<double>(j) / static_cast<double>(g.n);
      const double c = std::cos(angle) * std::cos(angle);
      const double s = 4.0 * std::sin(angle) * std::sin(angle) / (h * h);
      const double b = -c * idt2 + 0.25 * s;
      off[j] = b;
      double prev_cp = 0.0;
      for (std::size_t m = 0; m < nt; ++m) {
        const double diag = (m == 0) ? c * idt2 + 0.25 * s : 2.0 * c * idt2 + 0.5 * s;
        const double den = diag - (m == 0 ? 0.0 : b * prev_cp);
        inv_den[j * nt + m] = 1.0 / den;
        prev_cp = b / den;
        cp[j * nt + m] = prev_cp;
      }
    }
    const int n = static_cast<int>(g.n);
    const int rows = static_cast<int>(nt);
    const int nh = static_cast<int>(modes);
    real_buf = fftw_alloc_real(g.n * nt);
    spec_buf = fftw_alloc_complex(modes * nt);
    forward = fftw_plan_many_dft_r2c(1, &n, rows, real_buf, nullptr, 1, n, spec_buf, nullptr, 1, nh, FFTW_ESTIMATE);
    backward = fftw_plan_many_dft_c2r(1, &n, rows, spec_buf, nullptr, 1, nh, real_buf, nullptr, 1, n, FFTW_ESTIMATE);
  }

  ~Impl() {
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
    fftw_free(real_buf);
    fftw_free(spec_buf);
  }
};

NormalEquationSolver::NormalEquationSolver(const SpaceTimeGrid& g) : impl_(std::make_unique<Impl>(g)) {}
NormalEquationSolver::~NormalEquationSolver() = default;

void NormalEquationSolver::solve(std::span<const double> rhs, std::span<double> w) {
  Impl& p = *impl_;
  const std::size_t n = p.grid.n;
  const std::size_t nt = p.grid.nt;
  std::copy(rhs.begin(), rhs.begin() + static_cast<std::ptrdiff_t>(n * nt), p.real_buf);
  fftw_execute(p.forward);
  auto* spec = reinterpret_cast<std::complex<double>*>(p.spec_buf);
  for (std::size_t j = 0; j < p.modes; ++j) {
    const double b = p.off[j];
    const double* cp = p.cp.data() + j * nt;
    const double* inv = p.inv_den.data() + j * nt;
    std::complex<double> prev = 0.0;
    for (std::size_t m = 0; m < nt; ++m) {
      std::complex<double>& x = spec[m * p.modes + j];
      x = (x - b * prev) * inv[m];
      prev = x;
    }
    for (std::size_t m = nt - 1; m-- > 0;) {
      spec[m * p.modes + j] -= cp[m] * spec[(m + 1) * p.modes + j];
    }
  }
  fftw_execute(p.backward);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t idx = 0; idx < n * nt; ++idx) w[idx] = p.real_buf[idx] * scale;
  std::fill(w.begin() + static_cast<std::ptrdiff_t>(n * nt), w.begin() + static_cast<std::ptrdiff_t>(n * (nt + 1)), 0.0);
}

void NormalEquationSolver::apply(std::span<const double> w, std::span<double> out) const {
  const SpaceTimeGrid& g = impl_->grid;
  std::vector<double> pinned(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(g.node_count()));
  std::fill(pinned.begin() + static_cast<std::ptrdiff_t>(g.n * g.nt), pinned.end(), 0.0);
  std::vector<double> cells(g.cell_count());
  std::vector<double> tmp(g.node_count());
  time_difference(g, pinned, cells);
  time_difference_adjoint(g, cells, out);
  space_difference(g, pinned, cells);
  space_difference_adjoint(g, cells, tmp);
  for (std::size_t idx = 0; idx < g.node_count(); ++idx) out[idx] += tmp[idx];
  std::fill(out.begin() + static_cast<std::ptrdiff_t>(g.n * g.nt), out.begin() + static_cast<std::ptrdiff_t>(g.node_count()), 0.0);
}

}  // namespace staggered
}  // namespace convexburgers
