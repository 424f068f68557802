#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "convexburgers/periodic.hpp"
#include "convexburgers/staggered.hpp"

namespace convexburgers {

/// A hyperbolic system in one space dimension with a strictly convex entropy.
class EntropySystem {
 public:
  virtual ~EntropySystem() = default;

  virtual std::size_t dim() const = 0;
  virtual std::string name() const = 0;

  virtual bool contains(const Eigen::VectorXd& v) const = 0;
  virtual Eigen::VectorXd interior_point() const = 0;

  virtual double entropy(const Eigen::VectorXd& v) const = 0;
  virtual Eigen::VectorXd entropy_gradient(const Eigen::VectorXd& v) const = 0;
  virtual Eigen::MatrixXd entropy_hessian(const Eigen::VectorXd& v) const = 0;

  virtual Eigen::VectorXd flux(const Eigen::VectorXd& v) const = 0;
  /// (alpha, beta) entry is d F^alpha / d v_beta.
  virtual Eigen::MatrixXd flux_jacobian(const Eigen::VectorXd& v) const = 0;
  virtual Eigen::MatrixXd flux_hessian(const Eigen::VectorXd& v, std::size_t alpha) const = 0;
};

/// u_t + (u^2/2)_x = 0 with entropy u^2/2.
class BurgersSystem final : public EntropySystem {
 public:
  std::size_t dim() const override { return 1; }
  std::string name() const override { return "burgers"; }
  bool contains(const Eigen::VectorXd& v) const override;
  Eigen::VectorXd interior_point() const override;
  double entropy(const Eigen::VectorXd& v) const override;
  Eigen::VectorXd entropy_gradient(const Eigen::VectorXd& v) const override;
  Eigen::MatrixXd entropy_hessian(const Eigen::VectorXd& v) const override;
  Eigen::VectorXd flux(const Eigen::VectorXd& v) const override;
  Eigen::MatrixXd flux_jacobian(const Eigen::VectorXd& v) const override;
  Eigen::MatrixXd flux_hessian(const Eigen::VectorXd& v, std::size_t alpha) const override;
};

/// State (rho, q), rho > 0; E = q^2/2rho + rho log rho, F = (q, q^2/rho + rho).
class IsothermalEulerSystem final : public EntropySystem {
 public:
  std::size_t dim() const override { return 2; }
  std::string name() const override { return "isothermal-euler"; }
  bool contains(const Eigen::VectorXd& v) const override;
  Eigen::VectorXd interior_point() const override;
  double entropy(const Eigen::VectorXd& v) const override;
  Eigen::VectorXd entropy_gradient(const Eigen::VectorXd& v) const override;
  Eigen::MatrixXd entropy_hessian(const Eigen::VectorXd& v) const override;
  Eigen::VectorXd flux(const Eigen::VectorXd& v) const override;
  Eigen::MatrixXd flux_jacobian(const Eigen::VectorXd& v) const override;
  Eigen::MatrixXd flux_hessian(const Eigen::VectorXd& v, std::size_t alpha) const override;
};

/// States sampled on the nodes of a space-time grid, (nt + 1) x n x m,
/// stored as values[(k * n + i) * m + alpha].
struct StateField {
  SpaceTimeGrid grid;
  std::size_t m;
  std::vector<double> values;

  StateField(SpaceTimeGrid g, std::size_t components);

  Eigen::VectorXd at(std::size_t k, std::size_t i) const;
  void set(std::size_t k, std::size_t i, const Eigen::VectorXd& v);
};

/// Dual variables on the same node layout as StateField; row nt is zero.
struct DualField {
  SpaceTimeGrid grid;
  std::size_t m;
  std::vector<double> values;

  DualField(SpaceTimeGrid g, std::size_t components);

  double& operator()(std::size_t k, std::size_t i, std::size_t alpha = 0) {
    return values[(k * grid.n + i) * m + alpha];
  }
  double operator()(std::size_t k, std::size_t i, std::size_t alpha = 0) const {
    return values[(k * grid.n + i) * m + alpha];
  }
};

/// sup over V of A.V + B.F(V) - E(V); +inf when unbounded.
///
/// Damped Newton from the interior point while the inner Hessian is
/// negative definite, gradient ascent otherwise. If concavity is not
/// confirmed at the end, 16 further starts are run and must agree to 1e-6,
/// else NonConcaveInner is thrown.
double conjugate_K(const EntropySystem& system, const Eigen::VectorXd& A, const Eigen::VectorXd& B);

/// A^2 / 2(1 - B) for B < 1, 0 at (0, 1), +inf otherwise.
double burgers_K(double A, double B);

/// Flux Jacobian by Ridders-extrapolated central differences.
Eigen::MatrixXd finite_difference_flux_jacobian(const EntropySystem& system, const Eigen::VectorXd& v);

/// ||S - S^T|| / max(1, ||S||) with S = Hess E * dF (Frobenius norms), dF
/// from finite_difference_flux_jacobian.
double symmetry_residual(const EntropySystem& system, const Eigen::VectorXd& v);

/// W(t, x) = (t - T) grad E(U(t, x)) with T = U.grid.T.
/// Throws StateOutOfDomain if any state of U lies outside the domain.
DualField theorem1_W(const EntropySystem& system, const StateField& U);

struct CriterionReport {
  double min_eigenvalue;
  bool pass;
  /// Minimum over probes at every node, (nt + 1) x n.
  std::vector<double> node_minimum;
};

/// Minimum eigenvalue of Hess E(V) + (T - t) sum_alpha d_x(grad E(U))_alpha Hess F^alpha(V)
/// over every node (t, x) and every probe V. The probe set is the caller's
/// list plus the corners and center of the field's range inflated by 50%
/// (corners outside the domain are skipped). d_x is a centered difference.
CriterionReport criterion_check(const EntropySystem& system, const StateField& U,
                                const std::vector<Eigen::VectorXd>& probes);

/// Quadrature of -(d_t W)^2 / 2(1 - d_x W) + d_t W u0 over the cells of
/// the space-time grid. d_t W and d_x W are the box differences of the
/// staggered module; u0 is averaged onto cell midpoints.
///
/// Throws Infeasible where d_x W > 1 - 1e-12 with d_t W != 0, or d_x W > 1.
double objective(const BurgersSystem& system, const DualField& W, const SampledFn& u0);

}  // namespace convexburgers
