#include "convexburgers/primal_solver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "convexburgers/errors.hpp"
#include "convexburgers/hopf_lax.hpp"

namespace convexburgers::primal {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Root of alpha - lam + beta^2 / 2(1 + lam)^2 on lam >= 0, given that the
// left-hand side is positive at 0. The function is convex and decreasing, so
// Newton from the left converges monotonically; bisection guards round-off.
double projection_multiplier(double alpha, double beta) {
  const double b2 = 0.5 * beta * beta;
  const auto g = [&](double lam) { return alpha - lam + b2 / ((1.0 + lam) * (1.0 + lam)); };
  double lo = 0.0;
  double hi = std::max(alpha, 0.0) + b2;
  double lam = std::max(alpha, 0.0);
  const double tol = 1e-12 * std::max({1.0, std::abs(alpha), b2});
  for (int it = 0; it < 100; ++it) {
    const double val = g(lam);
    if (std::abs(val) <= tol) return lam;
    if (val > 0.0) lo = lam; else hi = lam;
    const double onep = 1.0 + lam;
    const double slope = -1.0 - 2.0 * b2 / (onep * onep * onep);
    double next = lam - val / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == lam) return lam;
    lam = next;
  }
  return lam;
}

void check_iterate_shape(const PrimalIterate& it) {
  const SpaceTimeGrid& g = it.grid;
  if (it.rho.size() != g.cell_count() || it.q.size() != g.cell_count() || it.sigma_rho.size() != g.cell_count() ||
      it.sigma_q.size() != g.cell_count() || it.W.size() != g.node_count()) {
    throw InvalidArgument("primal iterate arrays do not match the grid");
  }
}

double weighted_norm(const std::vector<double>& a, const std::vector<double>& b, double weight) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * a[i] + b[i] * b[i];
  return std::sqrt(s * weight);
}

SolverReport iterate(const SampledFn& u0, PrimalIterate& it, const SolverOptions& opts) {
  if (!(opts.r > 0.0) || !(it.r > 0.0)) throw BadOptions("solve_primal: penalty r must be positive");
  if (!(opts.tol > 0.0)) throw BadOptions("solve_primal: tol must be positive");
  if (opts.divergence_window == 0) throw BadOptions("solve_primal: divergence_window must be positive");
  check_iterate_shape(it);
  const SpaceTimeGrid& g = it.grid;
  if (u0.size() != g.n) throw InvalidArgument("solve_primal: u0 and grid sizes differ");

  SolverReport report;
  const SampledFn phi0 = antiderivative_zero_mean(u0);
  report.reference_value =
      std::isnan(opts.reference_value) ? -quadrature(hopf_lax::solve(phi0, g.T).phi) : opts.reference_value;
  if (g.dt() * static_cast<double>(g.n) * u0.max_abs() > 4.0) {
    report.warnings.push_back("dt * n * sup|u0| exceeds 4; the time grid is coarse for this data");
  }
  const double jref = report.reference_value;
  const double scale = std::abs(jref) < 1e-14 ? 1.0 : std::abs(jref);

  const std::size_t cells = g.cell_count();
  const std::size_t n = g.n;
  const double weight = g.cell_volume();
  const std::vector<double> u0c = staggered::to_cell_midpoints(u0.values);
  staggered::NormalEquationSolver normal(g);

  std::vector<double> tr(cells), tq(cells), a(cells), b(cells), rhs(g.node_count()), tmp(g.node_count());
  std::vector<double> drho(cells), dq(cells), pr(cells), pq(cells);
  double prev_objective = primal_objective(g, it.rho, it.q, u0);

  while (it.iteration < opts.max_iterations) {
    const double r = it.r;
    for (std::size_t c = 0; c < cells; ++c) {
      tr[c] = it.rho[c] - 1.0 - it.sigma_rho[c] / r;
      tq[c] = it.q[c] - it.sigma_q[c] / r;
    }
    // rho = 1 - B W, q = A W
    staggered::space_difference_adjoint(g, tr, rhs);
    staggered::time_difference_adjoint(g, tq, tmp);
    for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] = tmp[k] - rhs[k];
    normal.solve(rhs, it.W);
    staggered::time_difference(g, it.W, a);
    staggered::space_difference(g, it.W, b);

    for (std::size_t c = 0; c < cells; ++c) {
      const ProxResult y = prox_kinetic(1.0 - b[c] + it.sigma_rho[c] / r, a[c] + it.sigma_q[c] / r, u0c[c % n], r);
      drho[c] = y.rho - it.rho[c];
      dq[c] = y.q - it.q[c];
      it.rho[c] = y.rho;
      it.q[c] = y.q;
      pr[c] = 1.0 - b[c] - y.rho;
      pq[c] = a[c] - y.q;
      it.sigma_rho[c] += r * pr[c];
      it.sigma_q[c] += r * pq[c];
    }
    ++it.iteration;

    const double objective = primal_objective(g, it.rho, it.q, u0);
    const double primal_res = weighted_norm(pr, pq, weight);
    const double dual_res = r * weighted_norm(drho, dq, weight);
    const double residual = continuity_residual(g, it.rho, it.q);
    if (!std::isfinite(objective) || !std::isfinite(primal_res) || !std::isfinite(residual)) {
      throw Diverged("solve_primal: non-finite iterate at iteration " + std::to_string(it.iteration));
    }
    const double gap = (jref - objective) / scale;
    report.objective_history.push_back(objective);
    report.gap_history.push_back(gap);
    report.residual_history.push_back(residual);

    if (it.iteration > opts.burn_in && objective < prev_objective - 1e-6) {
      if (++it.decrease_run >= opts.divergence_window) {
        throw Diverged("solve_primal: objective decreased for " + std::to_string(it.decrease_run) +
                       " consecutive iterations");
      }
    } else {
      it.decrease_run = 0;
    }
    prev_objective = objective;
    if (opts.on_iteration) opts.on_iteration(it);

    if (std::abs(gap) <= opts.tol && residual <= 10.0 * opts.tol) {
      report.converged = true;
      break;
    }
    if (opts.adaptive_r) {
      if (primal_res > 10.0 * dual_res) {
        it.r = r * 2.0;
      } else if (dual_res > 10.0 * primal_res) {
        it.r = r * 0.5;
      }
    }
  }
  report.iterations = it.iteration;
  return report;
}

// Continuous version of the substitute in label space. phi0 is interpolated
// by cubic Hermite with fourth-order slopes; each gap of omega is replaced by
// the exact bitangent of a^2 + 2T phi0 found by Newton from the discrete
// contact nodes. A label a sits at a + t u(a) and carries cumulative mass
// a + T u(a) and momentum phi(a) + T u(a)^2 / 2, both C^1 and monotone in a
// for the mass. Working from the node hull directly is only first order:
// the true tangency falls between nodes, and the divergence stencil turns
// that into O(1) errors.
class LagrangianSubstitute {
 public:
  struct Point {
    double u;
    double mass;
    double momentum;
  };

  explicit LagrangianSubstitute(const shock_free::SubstituteResult& sub)
      : phi0_(sub.phi0), slope_(derivative_fourth_order(sub.phi0)), T_(sub.T), h_(sub.phi0.spacing()) {
    const std::size_t n = sub.omega.size();
    std::size_t first = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (sub.omega[j] && !sub.omega[(j + 1) % n]) {
        first = j;
        break;
      }
    }
    if (first == n) return;  // no gaps (or no contact at all)
    // walk once around the circle from the first gap's left contact
    std::size_t j = first;
    for (std::size_t steps = 0; steps < n;) {
      if (sub.omega[j % n] && !sub.omega[(j + 1) % n]) {
        std::size_t r = j + 1;
        while (!sub.omega[r % n]) ++r;
        add_gap(static_cast<double>(j) * h_, static_cast<double>(r) * h_);
        steps += r - j;
        j = r;
      } else {
        ++j;
        ++steps;
      }
    }
  }

  double max_speed() const { return slope_.max_abs(); }

  Point eval(double a) const {
    double phi = 0.0;
    double u = 0.0;
    const double frac = a - std::floor(a);
    bool in_gap = false;
    for (const auto& gap : gaps_) {
      for (double shift : {0.0, 1.0}) {
        const double b = frac + shift;
        if (b > gap.left && b < gap.right) {
          u = (gap.slope - 2.0 * b) / (2.0 * T_);
          phi = (gap.g_left + gap.slope * (b - gap.left) - b * b) / (2.0 * T_);
          in_gap = true;
        }
      }
    }
    if (!in_gap) hermite(a, phi, u);
    return {u, a + T_ * u, phi + 0.5 * T_ * u * u};
  }

 private:
  struct Gap {
    double left;
    double right;
    double slope;
    double g_left;
  };

  void hermite(double a, double& phi, double& u) const {
    const double sa = a / h_;
    const double fl = std::floor(sa);
    const auto j = static_cast<std::ptrdiff_t>(fl);
    const double s = sa - fl;
    const double p0 = phi0_[j], p1 = phi0_[j + 1];
    const double m0 = slope_[j], m1 = slope_[j + 1];
    const double s2 = s * s, s3 = s2 * s;
    phi = (2 * s3 - 3 * s2 + 1) * p0 + (s3 - 2 * s2 + s) * h_ * m0 + (3 * s2 - 2 * s3) * p1 + (s3 - s2) * h_ * m1;
    u = (6 * s2 - 6 * s) * (p0 - p1) / h_ + (3 * s2 - 4 * s + 1) * m0 + (3 * s2 - 2 * s) * m1;
  }

  // a^2 + 2T phi and its derivative on unwrapped labels
  void parabola(double a, double& g, double& dg) const {
    double phi = 0.0;
    double u = 0.0;
    hermite(a, phi, u);
    g = a * a + 2.0 * T_ * phi;
    dg = 2.0 * a + 2.0 * T_ * u;
  }

  void add_gap(double left, double right) {
    double l = left;
    double r = right;
    for (int it = 0; it < 50; ++it) {
      double gl, dl, gr, dr;
      parabola(l, gl, dl);
      parabola(r, gr, dr);
      const double s = (gr - gl) / (r - l);
      // tangency at both ends: dl = s and dr = s. Along the chord the
      // residuals depend on l and r through the local curvatures.
      const double eps = 1e-7 * h_;
      double g2, d2;
      parabola(l + eps, g2, d2);
      const double cl = (d2 - dl) / eps;
      parabola(r + eps, g2, d2);
      const double cr = (d2 - dr) / eps;
      if (!(cl > 0.0) || !(cr > 0.0)) break;
      // d s / d l = (s - dl) / (r - l), d s / d r = (dr - s) / (r - l)
      const double w = r - l;
      const double f1 = dl - s;
      const double f2 = dr - s;
      const double a11 = cl + f1 / w, a12 = -f2 / w;
      const double a21 = f1 / w, a22 = cr - f2 / w;
      const double det = a11 * a22 - a12 * a21;
      if (det == 0.0) break;
      const double dlx = (f1 * a22 - f2 * a12) / det;
      const double drx = (a11 * f2 - a21 * f1) / det;
      const double nl = std::clamp(l - dlx, left - h_, left + h_);
      const double nr = std::clamp(r - drx, right - h_, right + h_);
      const bool done = std::abs(nl - l) + std::abs(nr - r) <= 1e-15;
      l = nl;
      r = nr;
      if (done) break;
    }
    double gl, dl, gr, dr;
    parabola(l, gl, dl);
    parabola(r, gr, dr);
    const double base = std::floor(l);
    gaps_.push_back({l - base, r - base, (gr - gl) / (r - l) - 2.0 * base, gl - 2.0 * base * l + base * base});
  }

  SampledFn phi0_;
  SampledFn slope_;
  double T_;
  double h_;
  std::vector<Gap> gaps_;
};

}  // namespace

PrimalIterate::PrimalIterate(const SpaceTimeGrid& g)
    : grid(g),
      rho(g.cell_count(), 1.0),
      q(g.cell_count(), 0.0),
      W(g.node_count(), 0.0),
      sigma_rho(g.cell_count(), 0.0),
      sigma_q(g.cell_count(), 0.0) {}

ProxResult prox_kinetic(double y_rho, double y_q, double c, double r) {
  const double zq = y_q + c / r;
  const double alpha = r * y_rho;
  const double beta = r * zq;
  if (alpha + 0.5 * beta * beta <= 0.0) return {0.0, 0.0};
  const double lam = projection_multiplier(alpha, beta);
  return {lam / r, zq * lam / (1.0 + lam)};
}

PrimalResult solve_primal(const SampledFn& u0, double T, const SpaceTimeGrid& grid, const SolverOptions& opts) {
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidTime("solve_primal: T must be positive");
  if (T != grid.T) throw InvalidTime("solve_primal: T does not match the grid horizon");
  PrimalIterate it(grid);
  it.r = opts.r;
  const std::vector<double> u0c = staggered::to_cell_midpoints(u0.values);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) it.q[c] = u0c[c % grid.n];
  SolverReport report = iterate(u0, it, opts);
  return {std::move(it), std::move(report)};
}

PrimalResult resume_primal(const SampledFn& u0, PrimalIterate start, const SolverOptions& opts) {
  SolverReport report = iterate(u0, start, opts);
  return {std::move(start), std::move(report)};
}

double primal_objective(const SpaceTimeGrid& grid, const std::vector<double>& rho, const std::vector<double>& q,
                        const SampledFn& u0) {
  const std::vector<double> u0c = staggered::to_cell_midpoints(u0.values);
  double sum = 0.0;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    double cost = 0.0;
    if (q[c] != 0.0) {
      if (!(rho[c] > 0.0)) return -kInf;
      cost = q[c] * q[c] / (2.0 * rho[c]);
    }
    sum += -cost + q[c] * u0c[c % grid.n];
  }
  return sum * grid.cell_volume();
}

double continuity_residual(const SpaceTimeGrid& grid, const std::vector<double>& rho, const std::vector<double>& q) {
  const std::size_t n = grid.n;
  const double idt = 1.0 / grid.dt();
  const double ih = 1.0 / grid.dx();
  const auto at = [n](const std::vector<double>& f, std::size_t k, std::size_t i) { return f[k * n + i]; };
  double interior = 0.0;
  for (std::size_t k = 1; k < grid.nt; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t im = (i + n - 1) % n;
      const double dt_rho = 0.5 * ((at(rho, k, im) + at(rho, k, i)) - (at(rho, k - 1, im) + at(rho, k - 1, i))) * idt;
      const double dx_q = 0.5 * ((at(q, k - 1, i) + at(q, k, i)) - (at(q, k - 1, im) + at(q, k, im))) * ih;
      const double d = dt_rho + dx_q;
      interior += d * d;
    }
  }
  double terminal = 0.0;
  const std::size_t last = grid.nt - 1;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t im = (i + n - 1) % n;
    const double rho_t = 0.5 * (at(rho, last, im) + at(rho, last, i)) -
                         0.5 * grid.dt() * (at(q, last, i) - at(q, last, im)) * ih;
    terminal += (rho_t - 1.0) * (rho_t - 1.0);
  }
  return std::sqrt(interior * grid.cell_volume()) + std::sqrt(terminal * grid.dx());
}

double continuity_residual(const PrimalIterate& it) { return continuity_residual(it.grid, it.rho, it.q); }

VelocityField extract_velocity(const PrimalIterate& it, double rho_floor) {
  if (!(rho_floor > 0.0)) throw InvalidArgument("extract_velocity: rho_floor must be positive");
  VelocityField out{std::vector<double>(it.rho.size()), std::vector<bool>(it.rho.size())};
  for (std::size_t c = 0; c < it.rho.size(); ++c) {
    out.v[c] = it.q[c] / std::max(it.rho[c], rho_floor);
    out.vacuum[c] = it.rho[c] < rho_floor;
  }
  return out;
}

PrimalIterate iterate_from_substitute(const shock_free::SubstituteResult& sub, std::size_t nt) {
  const SpaceTimeGrid g(sub.phi0.size(), nt, sub.T);
  const std::size_t n = g.n;
  const double h = g.dx();
  const LagrangianSubstitute lag(sub);
  const double umax = lag.max_speed();

  // W(t, x) = x - M(A_t(x)), A_t the label at x and M the cumulative mass of
  // labels, has d_x W = 1 - rho and d_t W = q. Its box differences are cell
  // averages (exact in one direction, trapezoid in the other) and satisfy
  // the discrete constraint exactly. Point samples of rho and q at slab
  // midpoints do not: after a shock the vacuum edge is a moving jump and
  // the divergence of the samples grows like 1 / sqrt(h) in L2.
  PrimalIterate it(g);
  for (std::size_t k = 0; k < nt; ++k) {
    const double t = g.time(k);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = static_cast<double>(i) * h;
      double lo = x - t * umax - h;
      double hi = x + t * umax + h;
      for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (mid + t * lag.eval(mid).u < x ? lo : hi) = mid;
      }
      it.W[k * n + i] = x - lag.eval(0.5 * (lo + hi)).mass;
    }
  }
  // row nt stays 0: rho(T) = 1
  staggered::time_difference(g, it.W, it.q);
  staggered::space_difference(g, it.W, it.rho);
  for (auto& r : it.rho) r = 1.0 - r;
  return it;
}

void save_checkpoint(const std::string& path, const PrimalIterate& it) {
  check_iterate_shape(it);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("save_checkpoint: cannot open " + path);
  const nlohmann::json header{{"n", it.grid.n},           {"nt", it.grid.nt}, {"T", it.grid.T},
                              {"iteration", it.iteration}, {"r", it.r},        {"decrease_run", it.decrease_run}};
  std::ostringstream line;
  line.precision(17);
  line << header.dump() << '\n';
  out << line.str();
  for (const auto* field : {&it.rho, &it.q, &it.W, &it.sigma_rho, &it.sigma_q}) {
    out.write(reinterpret_cast<const char*>(field->data()), static_cast<std::streamsize>(field->size() * sizeof(double)));
  }
  if (!out) throw InvalidArgument("save_checkpoint: write failed for " + path);
}

PrimalIterate load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("load_checkpoint: cannot open " + path);
  std::string line;
  std::getline(in, line);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("load_checkpoint: bad header in " + path + ": " + e.what());
  }
  const SpaceTimeGrid g(header.at("n").get<std::size_t>(), header.at("nt").get<std::size_t>(),
                        header.at("T").get<double>());
  PrimalIterate it(g);
  it.iteration = header.at("iteration").get<std::size_t>();
  it.r = header.at("r").get<double>();
  it.decrease_run = header.value("decrease_run", std::size_t{0});
  for (auto* field : {&it.rho, &it.q, &it.W, &it.sigma_rho, &it.sigma_q}) {
    in.read(reinterpret_cast<char*>(field->data()), static_cast<std::streamsize>(field->size() * sizeof(double)));
  }
  if (!in) throw InvalidArgument("load_checkpoint: truncated data in " + path);
  return it;
}

}  // namespace convexburgers::primal
