#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "circmap/domain.hpp"

namespace circmap {

/// Least-squares series model of the harmonic measures u_1..u_g.
///
/// Basis: 1, Re/Im z^k for the unit circle, and per inner circle
/// log(|z - q| / r), Re/Im t^k with t = r / (z - q), k = 1..N.
class HarmonicModel {
 public:
  HarmonicModel(CircularDomain d, int order, Eigen::MatrixXd coefficients, double residual, double condition);

  const CircularDomain& domain() const { return domain_; }
  int genus() const { return domain_.genus(); }
  int order() const { return order_; }
  /// Max boundary misfit over a check grid offset from the collocation points.
  double residual() const { return residual_; }
  double condition() const { return condition_; }

  /// Harmonic measure of boundary j in 0..g; u_0 = 1 - sum of the others.
  double u(int j, Complex z) const;
  /// (u_1(z), ..., u_g(z)).
  Eigen::VectorXd u_all(Complex z) const;

  /// (du_j/dx, du_j/dy).
  std::array<double, 2> grad_u(int j, Complex z) const;
  /// Rows j = 1..g, columns (d/dx, d/dy).
  Eigen::MatrixX2d grad_all(Complex z) const;

  /// Analytic completion U_j with Re U_j = u_j, principal logarithm branch (j = 1..g).
  Complex U(int j, Complex z) const;
  Eigen::VectorXcd U_all(Complex z) const;
  Eigen::VectorXcd dU_all(Complex z) const;

  /// Coefficient of log|z - q_l| in u_j (j, l = 1..g).
  double log_coefficient(int j, int l) const;

  /// Derivative of u_j along the inward normal of boundary l at w.
  double normal_derivative(int j, int l, Complex w) const;

 private:
  CircularDomain domain_;
  int order_;
  Eigen::MatrixXd coef_;  // basis x g
  double residual_;
  double condition_;
};

/// Fit with basis order N and M collocation points per boundary circle.
HarmonicModel solve_harmonic_measures(const CircularDomain& d, int N = 24, int M = 256);

double eval_u(const HarmonicModel& m, int j, Complex z);
std::array<double, 2> eval_grad_u(const HarmonicModel& m, int j, Complex z);

/// g x g matrix of inward normal derivatives du_j/dn at one point per inner circle.
Eigen::MatrixXd normal_derivative_matrix(const HarmonicModel& m, const std::vector<Complex>& points);

/// v_j = sum_k D_jk U_k / (2 pi i) - const, with D the inverse of the log-coefficient
/// matrix so that the period of dv_j around gamma_i is delta_ij, and v_j(1) = 0.
class IntegralsFirstKind {
 public:
  explicit IntegralsFirstKind(const HarmonicModel& m);

  const HarmonicModel& model() const { return *model_; }
  int genus() const { return model_->genus(); }
  const Eigen::MatrixXd& combination() const { return D_; }

  /// Principal-branch value (j = 1..g).
  Complex v(int j, Complex z) const;
  Eigen::VectorXcd v_all(Complex z) const;
  Eigen::VectorXcd dv_all(Complex z) const;

  /// Values of v along a polyline, continued across the logarithm cuts.
  /// Consecutive points must change arg(z - q_l) by less than pi/2.
  std::vector<Eigen::VectorXcd> v_along(const std::vector<Complex>& path) const;

  /// v(to) - v(from) continued along the straight segment.
  Eigen::VectorXcd increment(Complex from, Complex to) const;

  /// Trapezoid quadrature of the integral of dv_j over boundary i (counterclockwise).
  Complex period(int j, int i, int samples = 512) const;

  /// tau = -(i / pi) D, from the harmonic relation.
  Eigen::MatrixXcd tau() const;

 private:
  std::shared_ptr<const HarmonicModel> model_;
  Eigen::MatrixXd D_;
  Eigen::VectorXcd offset_;
};

IntegralsFirstKind integrals_first_kind(const HarmonicModel& m);

struct PeriodMatrix {
  Eigen::MatrixXcd tau;
  /// Max difference between the three base-point evaluations.
  double base_point_spread = 0.0;
};

/// tau_ij = v_j(theta_i(z0)) - v_j(z0) along a branch-tracked path, z0 = 1/conj(w) for w on gamma_i.
PeriodMatrix period_matrix(const IntegralsFirstKind& v, const CircularDomain& d);

/// Max-norm of 2i Im v(z) - tau u(z).
double har_relation_residual(const HarmonicModel& m, const IntegralsFirstKind& v, const PeriodMatrix& tau, Complex z);

}  // namespace circmap
