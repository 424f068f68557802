#include "convexburgers/duality.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "convexburgers/errors.hpp"
#include "convexburgers/parallel.hpp"

namespace convexburgers {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

VectorXd vec1(double a) { return VectorXd::Constant(1, a); }
MatrixXd mat1(double a) { return MatrixXd::Constant(1, 1, a); }

void require_dim(const EntropySystem& s, const VectorXd& v) {
  if (static_cast<std::size_t>(v.size()) != s.dim()) {
    throw InvalidArgument(s.name() + ": state has dimension " + std::to_string(v.size()) + ", expected " +
                          std::to_string(s.dim()));
  }
}

}  // namespace

// ---- Burgers ---------------------------------------------------------------

bool BurgersSystem::contains(const VectorXd& v) const { return v.size() == 1 && std::isfinite(v[0]); }
VectorXd BurgersSystem::interior_point() const { return vec1(0.0); }
double BurgersSystem::entropy(const VectorXd& v) const { return 0.5 * v[0] * v[0]; }
VectorXd BurgersSystem::entropy_gradient(const VectorXd& v) const { return vec1(v[0]); }
MatrixXd BurgersSystem::entropy_hessian(const VectorXd&) const { return mat1(1.0); }
VectorXd BurgersSystem::flux(const VectorXd& v) const { return vec1(0.5 * v[0] * v[0]); }
MatrixXd BurgersSystem::flux_jacobian(const VectorXd& v) const { return mat1(v[0]); }
MatrixXd BurgersSystem::flux_hessian(const VectorXd&, std::size_t) const { return mat1(1.0); }

// ---- isothermal Euler ------------------------------------------------------

bool IsothermalEulerSystem::contains(const VectorXd& v) const {
  return v.size() == 2 && v[0] > 0.0 && std::isfinite(v[0]) && std::isfinite(v[1]);
}

VectorXd IsothermalEulerSystem::interior_point() const { return VectorXd::Unit(2, 0); }

double IsothermalEulerSystem::entropy(const VectorXd& v) const {
  const double rho = v[0];
  const double q = v[1];
  return q * q / (2.0 * rho) + rho * std::log(rho);
}

VectorXd IsothermalEulerSystem::entropy_gradient(const VectorXd& v) const {
  const double rho = v[0];
  const double u = v[1] / rho;
  VectorXd g(2);
  g << -0.5 * u * u + std::log(rho) + 1.0, u;
  return g;
}

MatrixXd IsothermalEulerSystem::entropy_hessian(const VectorXd& v) const {
  const double rho = v[0];
  const double u = v[1] / rho;
  MatrixXd h(2, 2);
  h << (u * u + 1.0) / rho, -u / rho, -u / rho, 1.0 / rho;
  return h;
}

VectorXd IsothermalEulerSystem::flux(const VectorXd& v) const {
  const double rho = v[0];
  const double q = v[1];
  VectorXd f(2);
  f << q, q * q / rho + rho;
  return f;
}

MatrixXd IsothermalEulerSystem::flux_jacobian(const VectorXd& v) const {
  const double u = v[1] / v[0];
  MatrixXd j(2, 2);
  j << 0.0, 1.0, 1.0 - u * u, 2.0 * u;
  return j;
}

MatrixXd IsothermalEulerSystem::flux_hessian(const VectorXd& v, std::size_t alpha) const {
  if (alpha == 0) return MatrixXd::Zero(2, 2);
  const double rho = v[0];
  const double u = v[1] / rho;
  MatrixXd h(2, 2);
  h << 2.0 * u * u / rho, -2.0 * u / rho, -2.0 * u / rho, 2.0 / rho;
  return h;
}

// ---- fields ----------------------------------------------------------------

StateField::StateField(SpaceTimeGrid g, std::size_t components)
    : grid(g), m(components), values(g.node_count() * components, 0.0) {}

VectorXd StateField::at(std::size_t k, std::size_t i) const {
  return Eigen::Map<const VectorXd>(values.data() + (k * grid.n + i) * m, static_cast<Eigen::Index>(m));
}

void StateField::set(std::size_t k, std::size_t i, const VectorXd& v) {
  Eigen::Map<VectorXd>(values.data() + (k * grid.n + i) * m, static_cast<Eigen::Index>(m)) = v;
}

DualField::DualField(SpaceTimeGrid g, std::size_t components)
    : grid(g), m(components), values(g.node_count() * components, 0.0) {}

// ---- conjugate -------------------------------------------------------------

namespace {

struct Inner {
  const EntropySystem& sys;
  const VectorXd& A;
  const VectorXd& B;

  double value(const VectorXd& v) const { return A.dot(v) + B.dot(sys.flux(v)) - sys.entropy(v); }
  VectorXd gradient(const VectorXd& v) const {
    return A + sys.flux_jacobian(v).transpose() * B - sys.entropy_gradient(v);
  }
  MatrixXd hessian(const VectorXd& v) const {
    MatrixXd h = -sys.entropy_hessian(v);
    for (std::size_t a = 0; a < sys.dim(); ++a) {
      if (B[static_cast<Eigen::Index>(a)] != 0.0) h += B[static_cast<Eigen::Index>(a)] * sys.flux_hessian(v, a);
    }
    return h;
  }
  bool concave_at(const VectorXd& v) const {
    const MatrixXd neg = -hessian(v);
    Eigen::LLT<MatrixXd> llt(neg);
    return llt.info() == Eigen::Success;
  }
};

struct Ascent {
  VectorXd v;
  double value;
  bool unbounded = false;
};

Ascent ascend(const Inner& f, VectorXd v) {
  double fv = f.value(v);
  const double scale = 1.0 + f.A.lpNorm<Eigen::Infinity>() + f.B.lpNorm<Eigen::Infinity>();
  for (int it = 0; it < 200; ++it) {
    const VectorXd g = f.gradient(v);
    if (g.lpNorm<Eigen::Infinity>() <= 1e-14 * scale) break;
    const MatrixXd neg = -f.hessian(v);
    Eigen::LLT<MatrixXd> llt(neg);
    const VectorXd d = (llt.info() == Eigen::Success) ? VectorXd(llt.solve(g)) : g;
    const double slope = g.dot(d);
    double step = 1.0;
    bool accepted = false;
    VectorXd w;
    double fw = 0.0;
    for (int ls = 0; ls < 80; ++ls, step *= 0.5) {
      w = v + step * d;
      if (!f.sys.contains(w)) continue;
      fw = f.value(w);
      if (std::isfinite(fw) && fw >= fv + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    const double moved = (w - v).lpNorm<Eigen::Infinity>();
    v = w;
    fv = fw;
    if (v.lpNorm<Eigen::Infinity>() > 1e8) return {v, kInf, true};
    if (moved <= 1e-15 * (1.0 + v.lpNorm<Eigen::Infinity>())) break;
  }
  return {v, fv, false};
}

bool grows_along_ray(const Inner& f, const VectorXd& v0) {
  const double f0 = f.value(v0);
  for (Eigen::Index j = 0; j < v0.size(); ++j) {
    for (double sign : {1.0, -1.0}) {
      double prev = f0;
      bool growing = true;
      for (double s : {1e2, 1e3, 1e4}) {
        const VectorXd p = v0 + sign * s * VectorXd::Unit(v0.size(), j);
        if (!f.sys.contains(p)) {
          growing = false;
          break;
        }
        const double fp = f.value(p);
        if (!(fp > prev)) {
          growing = false;
          break;
        }
        prev = fp;
      }
      if (growing) return true;
    }
  }
  return false;
}

double radical_inverse(unsigned index, unsigned base) {
  double inv = 1.0 / base;
  double r = 0.0;
  for (double f = inv; index > 0; index /= base, f *= inv) r += f * (index % base);
  return r;
}

}  // namespace

double conjugate_K(const EntropySystem& system, const VectorXd& A, const VectorXd& B) {
  require_dim(system, A);
  require_dim(system, B);
  const Inner f{system, A, B};
  const VectorXd v0 = system.interior_point();
  if (grows_along_ray(f, v0)) return kInf;

  const Ascent first = ascend(f, v0);
  if (first.unbounded) return kInf;
  if (f.concave_at(first.v)) return first.value;

  static constexpr std::array<unsigned, 4> primes{2, 3, 5, 7};
  double lo = first.value;
  double hi = first.value;
  const double radius = 1.0 + v0.lpNorm<Eigen::Infinity>();
  for (unsigned s = 1; s < 16; ++s) {
    VectorXd offset(v0.size());
    for (Eigen::Index a = 0; a < v0.size(); ++a) {
      offset[a] = 4.0 * radius * (radical_inverse(s, primes[static_cast<std::size_t>(a) % primes.size()]) - 0.5);
    }
    VectorXd start = v0 + offset;
    for (int shrink = 0; shrink < 60 && !system.contains(start); ++shrink) {
      offset *= 0.5;
      start = v0 + offset;
    }
    const Ascent run = ascend(f, start);
    if (run.unbounded) return kInf;
    lo = std::min(lo, run.value);
    hi = std::max(hi, run.value);
  }
  if (hi - lo > 1e-6) {
    throw NonConcaveInner("conjugate_K(" + system.name() + "): 16 starts disagree, spread " + std::to_string(hi - lo));
  }
  return hi;
}

double burgers_K(double A, double B) {
  if (B < 1.0) return A * A / (2.0 * (1.0 - B));
  if (A == 0.0 && B == 1.0) return 0.0;
  return kInf;
}

// ---- symmetry --------------------------------------------------------------

MatrixXd finite_difference_flux_jacobian(const EntropySystem& system, const VectorXd& v) {
  require_dim(system, v);
  if (!system.contains(v)) throw StateOutOfDomain(system.name() + ": state outside the domain");
  const auto m = static_cast<Eigen::Index>(system.dim());
  MatrixXd jac(m, m);
  constexpr int ntab = 10;
  constexpr double con = 1.4;
  constexpr double con2 = con * con;
  for (Eigen::Index b = 0; b < m; ++b) {
    const VectorXd e = VectorXd::Unit(m, b);
    double hh = 0.1 * std::max(std::abs(v[b]), 0.1);
    while (!(system.contains(v + hh * e) && system.contains(v - hh * e))) hh *= 0.5;
    const auto central = [&](double step) -> VectorXd {
      return (system.flux(v + step * e) - system.flux(v - step * e)) / (2.0 * step);
    };
    std::array<std::array<VectorXd, ntab>, ntab> tab;
    tab[0][0] = central(hh);
    VectorXd best = tab[0][0];
    double err = kInf;
    for (int i = 1; i < ntab; ++i) {
      hh /= con;
      tab[0][i] = central(hh);
      double fac = con2;
      for (int j = 1; j <= i; ++j) {
        tab[j][i] = (tab[j - 1][i] * fac - tab[j - 1][i - 1]) / (fac - 1.0);
        fac *= con2;
        const double e1 = (tab[j][i] - tab[j - 1][i]).lpNorm<Eigen::Infinity>();
        const double e2 = (tab[j][i] - tab[j - 1][i - 1]).lpNorm<Eigen::Infinity>();
        const double errt = std::max(e1, e2);
        if (errt <= err) {
          err = errt;
          best = tab[j][i];
        }
      }
      if ((tab[i][i] - tab[i - 1][i - 1]).lpNorm<Eigen::Infinity>() >= 2.0 * err) break;
    }
    jac.col(b) = best;
  }
  return jac;
}

double symmetry_residual(const EntropySystem& system, const VectorXd& v) {
  const MatrixXd s = system.entropy_hessian(v) * finite_difference_flux_jacobian(system, v);
  return (s - s.transpose()).norm() / std::max(1.0, s.norm());
}

// ---- candidate maximizer and criterion -----------------------------------

namespace {

void require_field(const EntropySystem& system, const StateField& U) {
  if (U.m != system.dim()) {
    throw InvalidArgument(system.name() + ": state field has " + std::to_string(U.m) + " components");
  }
  for (std::size_t k = 0; k <= U.grid.nt; ++k) {
    for (std::size_t i = 0; i < U.grid.n; ++i) {
      if (!system.contains(U.at(k, i))) {
        throw StateOutOfDomain(system.name() + ": state at node (" + std::to_string(k) + ", " + std::to_string(i) +
                               ") is outside the domain");
      }
    }
  }
}

double min_eigenvalue(const MatrixXd& m) {
  if (m.rows() == 1) return m(0, 0);
  if (m.rows() == 2) {
    const double mean = 0.5 * (m(0, 0) + m(1, 1));
    const double half = 0.5 * (m(0, 0) - m(1, 1));
    const double off = 0.5 * (m(0, 1) + m(1, 0));
    return mean - std::hypot(half, off);
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

DualField theorem1_W(const EntropySystem& system, const StateField& U) {
  require_field(system, U);
  const SpaceTimeGrid& g = U.grid;
  DualField W(g, U.m);
  for (std::size_t k = 0; k < g.nt; ++k) {
    const double lag = g.time(k) - g.T;
    for (std::size_t i = 0; i < g.n; ++i) {
      const VectorXd grad = system.entropy_gradient(U.at(k, i));
      for (std::size_t a = 0; a < U.m; ++a) W(k, i, a) = lag * grad[static_cast<Eigen::Index>(a)];
    }
  }
  return W;
}

CriterionReport criterion_check(const EntropySystem& system, const StateField& U,
                                const std::vector<VectorXd>& probes) {
  require_field(system, U);
  for (const auto& p : probes) {
    require_dim(system, p);
    if (!system.contains(p)) throw StateOutOfDomain(system.name() + ": probe state outside the domain");
  }
  const SpaceTimeGrid& g = U.grid;
  const std::size_t m = U.m;
  const auto me = static_cast<Eigen::Index>(m);

  std::vector<double> grad(g.node_count() * m);
  VectorXd lo = VectorXd::Constant(me, kInf);
  VectorXd hi = VectorXd::Constant(me, -kInf);
  for (std::size_t k = 0; k <= g.nt; ++k) {
    for (std::size_t i = 0; i < g.n; ++i) {
      const VectorXd u = U.at(k, i);
      lo = lo.cwiseMin(u);
      hi = hi.cwiseMax(u);
      Eigen::Map<VectorXd>(grad.data() + (k * g.n + i) * m, me) = system.entropy_gradient(u);
    }
  }

  std::vector<VectorXd> all = probes;
  const VectorXd center = 0.5 * (lo + hi);
  const VectorXd half = 0.75 * (hi - lo);
  all.push_back(center);
  for (unsigned corner = 0; corner < (1u << m); ++corner) {
    VectorXd p = center;
    for (std::size_t a = 0; a < m; ++a) {
      const auto ai = static_cast<Eigen::Index>(a);
      p[ai] += ((corner >> a) & 1u) ? half[ai] : -half[ai];
    }
    if (system.contains(p)) all.push_back(p);
  }

  std::vector<MatrixXd> hess_e;
  std::vector<std::vector<MatrixXd>> hess_f;
  for (const auto& p : all) {
    hess_e.push_back(system.entropy_hessian(p));
    std::vector<MatrixXd> per;
    for (std::size_t a = 0; a < m; ++a) per.push_back(system.flux_hessian(p, a));
    hess_f.push_back(std::move(per));
  }

  CriterionReport report{kInf, false, std::vector<double>(g.node_count(), kInf)};
  const double inv2h = 0.5 / g.dx();
  parallel_for(g.nt + 1, [&](std::size_t kb, std::size_t ke) {
    VectorXd dgrad(me);
    for (std::size_t k = kb; k < ke; ++k) {
      const double remaining = g.T - g.time(k);
      for (std::size_t i = 0; i < g.n; ++i) {
        const std::size_t ip = (i + 1) % g.n;
        const std::size_t im = (i + g.n - 1) % g.n;
        for (std::size_t a = 0; a < m; ++a) {
          dgrad[static_cast<Eigen::Index>(a)] =
              (grad[(k * g.n + ip) * m + a] - grad[(k * g.n + im) * m + a]) * inv2h;
        }
        double node_min = kInf;
        for (std::size_t p = 0; p < all.size(); ++p) {
          MatrixXd mat = hess_e[p];
          for (std::size_t a = 0; a < m; ++a) mat += remaining * dgrad[static_cast<Eigen::Index>(a)] * hess_f[p][a];
          node_min = std::min(node_min, min_eigenvalue(mat));
        }
        report.node_minimum[k * g.n + i] = node_min;
      }
    }
  });
  for (double v : report.node_minimum) report.min_eigenvalue = std::min(report.min_eigenvalue, v);
  report.pass = report.min_eigenvalue > 0.0;
  return report;
}

double objective(const BurgersSystem&, const DualField& W, const SampledFn& u0) {
  const SpaceTimeGrid& g = W.grid;
  if (W.m != 1) throw InvalidArgument("objective: Burgers dual field must be scalar");
  if (u0.size() != g.n) throw InvalidArgument("objective: u0 and W grids differ");
  std::vector<double> a(g.cell_count());
  std::vector<double> b(g.cell_count());
  staggered::time_difference(g, W.values, a);
  staggered::space_difference(g, W.values, b);
  const std::vector<double> u0c = staggered::to_cell_midpoints(u0.values);
  double sum = 0.0;
  for (std::size_t k = 0; k < g.nt; ++k) {
    for (std::size_t i = 0; i < g.n; ++i) {
      const double at = a[k * g.n + i];
      const double bx = b[k * g.n + i];
      if (bx > 1.0 || (bx > 1.0 - 1e-12 && at != 0.0)) {
        throw Infeasible("objective: d_x W = " + std::to_string(bx) + " at cell (" + std::to_string(k) + ", " +
                         std::to_string(i) + ")");
      }
      const double cost = (at == 0.0) ? 0.0 : at * at / (2.0 * (1.0 - bx));
      sum += -cost + at * u0c[i];
    }
  }
  return sum * g.cell_volume();
}

}  // namespace convexburgers
