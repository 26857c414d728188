#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "circmap/function_theory.hpp"
#include "circmap/prime_function.hpp"
#include "circmap/slit_maps.hpp"

namespace circmap {

/// Boundary degree nu = (n_0, ..., n_g).
using BoundaryDegree = std::vector<int>;

struct ZeroConfig {
  std::vector<Complex> zeros;
  BoundaryDegree nu;
  /// |sum_k u_j(p_k) - n_j|, j = 1..g.
  std::vector<double> residual;

  int degree() const;
  double max_residual() const;
};

// ZeroConfig JSON: {"zeros":[[re,im],...], "nu":[n0,...,ng]}
ZeroConfig zero_config_from_json_text(const std::string& text);
std::string zero_config_to_json_text(const ZeroConfig& c);

/// Harmonic measures (u_1..u_g) at z, exact 0/1 for points on a boundary circle.
Eigen::VectorXd harmonic_measure_vector(const HarmonicModel& m, Complex z);

/// |sum_k u_j(p_k) - n_j| for j = 1..g.
std::vector<double> condition1_residual(const HarmonicModel& m, const std::vector<Complex>& zeros,
                                        const BoundaryDegree& nu);

/// Fills in the residual field.
ZeroConfig make_zero_config(const HarmonicModel& m, std::vector<Complex> zeros, BoundaryDegree nu);

struct NewtonOptions {
  double tol = 1e-10;
  int max_iter = 50;
  /// Reject iterates outside Omega (used by the paper-style continuation near the boundary).
  bool require_inside = true;
};

/// Newton on the g free points, each moving along a fixed line anchor_k + s_k dir_k.
/// Returns the parameters s.
std::vector<double> solve_on_lines(const HarmonicModel& m, const std::vector<Complex>& fixed, const BoundaryDegree& nu,
                                   const std::vector<Complex>& anchors, const std::vector<Complex>& directions,
                                   std::vector<double> s, const NewtonOptions& opts = {});

/// Completes n - g fixed points with g points so that condition (1) holds. Each free
/// point moves on the normal line of its nearest boundary circle through its guess.
std::vector<Complex> complete_zeros(const HarmonicModel& m, const std::vector<Complex>& fixed, const BoundaryDegree& nu,
                                    const std::vector<Complex>& guess, const NewtonOptions& opts = {});

/// A proper map f = R(F(z)) with F a product of slit maps (or a lifted Blaschke
/// product) and R a disk automorphism (a rotation unless built from boundary data).
class ProperMap {
 public:
  using Fn = std::function<Complex(Complex)>;

  ProperMap(ZeroConfig config, Fn base, Fn base_log_derivative, MobiusMap outer, std::string form);

  Complex operator()(Complex z) const;
  /// f'(z), analytic when the base form provides F'/F, central differences otherwise.
  Complex derivative(Complex z) const;
  Complex base(Complex z) const { return base_(z); }

  const ZeroConfig& config() const { return config_; }
  const BoundaryDegree& nu() const { return config_.nu; }
  const MobiusMap& outer() const { return outer_; }
  /// outer(0) direction for rotation-only maps; the unimodular factor applied to F.
  Complex rotation() const { return outer_.a / outer_.d; }
  const std::string& form() const { return form_; }

  /// Replace the outer automorphism (used by the normalizations).
  ProperMap with_outer(const MobiusMap& outer) const;

 private:
  ZeroConfig config_;
  Fn base_;
  Fn base_logd_;
  MobiusMap outer_;
  std::string form_;
};

/// f(z) = exp(-2 pi i sum_j n_j v_j(z)) prod_k eta(z, p_k), rotated so f(1) = 1.
ProperMap build_proper_map(const PrimeEvaluator& ev, const IntegralsFirstKind& v, const ZeroConfig& config,
                           double admissible_tol = 1e-8);

/// Zeros indexed by the boundary they are attached to: zeros[l] = {p_{l,0}, ...}.
using IndexedZeros = std::vector<std::vector<Complex>>;

/// prod_l prod_k rho_{l,i}(p_{l,k}) for each i = 0..g (rho_{l,l} = 1).
std::vector<double> slit_radius_products(const PrimeEvaluator& ev, const IndexedZeros& zeros);
double condition3_residual(const PrimeEvaluator& ev, const IndexedZeros& zeros);

/// f = K(P) prod eta_l(z, p_{l,k}), K = 1 / (common radius product), rotated so f(1) = 1.
ProperMap build_proper_map_alt(const PrimeEvaluator& ev, const IndexedZeros& zeros, double tol = 1e-5);

double boundary_modulus_deviation(const std::function<Complex(Complex)>& f, const CircularDomain& d, int samples);
double boundary_modulus_deviation(const ProperMap& f, const CircularDomain& d, int samples = 256);

/// Covering degree on boundary l (gamma_0 counterclockwise, inner circles clockwise), from
/// argument increments at `samples` steps, each step checked against its two halves.
int boundary_degree(const std::function<Complex(Complex)>& f, const CircularDomain& d, int l, int samples = 256);
int boundary_degree(const ProperMap& f, const CircularDomain& d, int l, int samples = 256);

/// Increment of sum_j n_j v_j around each boundary circle; the exponential factor is
/// single valued when every entry is an integer.
std::vector<Complex> exponential_factor_turns(const IntegralsFirstKind& v, const BoundaryDegree& nu, int samples = 256);

/// Newton refinement of a zero of f from each seed (one result per seed).
std::vector<Complex> locate_zeros(const std::function<Complex(Complex)>& f, const std::vector<Complex>& seeds,
                                  double tol = 1e-13);

struct BoundaryDataOptions {
  int steps = 32;
  /// Continuation horizon as a distance r_00(T) = T / alpha; <= 0 picks it from the geometry.
  double horizon = -1.0;
  double polish_tol = 1e-11;
  int polish_max_iter = 40;
};

struct BoundaryDataResult {
  /// Maximum of |f(w_{l,k}) - 1|.
  double boundary_error = 0.0;
  /// |f(p)|.
  double zero_error = 0.0;
  /// Max relative error of |f'(w_00)| / |f'(w_{l,k})| against lambda, by finite differences along normals.
  double ratio_error = 0.0;
  /// Largest t reached by the continuation and the polish residual.
  double t_reached = 0.0;
  double polish_residual = 0.0;
  /// The level set the map was normalized from, and its value f(level_set).
  std::vector<Complex> level_set;
  Complex level_value;
};

/// Map with f(p) = 0, f(w_{l,k}) = 1 and |f'(w_00)| / |f'(w_{l,k})| = lambda_{l,k}.
/// w[l] lists the points on gamma_l (n_l = w[l].size() >= 1); lambda[l][k-1] for k >= 1.
ProperMap from_boundary_data(const HarmonicModel& m, const PrimeEvaluator& ev, const IntegralsFirstKind& v, Complex p,
                             const std::vector<std::vector<Complex>>& w, const std::vector<std::vector<double>>& lambda,
                             const BoundaryDataOptions& opts = {}, BoundaryDataResult* result = nullptr);

/// prod_k m(z, p_k) / m(1, p_k).
Complex blaschke_eval(const std::vector<Complex>& zeros, Complex z);

/// exp(-2 pi i sum n_j v_j(z)) prod over enumerated words of B(theta z) / B(theta 1), rotated to f(1) = 1.
/// nu is inferred from condition (1); throws DomainError when the zeros are not admissible.
ProperMap lift_blaschke(const PrimeEvaluator& ev, const IntegralsFirstKind& v, const std::vector<Complex>& zeros,
                        double admissible_tol = 1e-8);

}  // namespace circmap
