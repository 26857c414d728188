#pragma once

#include "circmap/function_theory.hpp"
#include "circmap/prime_function.hpp"

namespace circmap {

/// Circular slit map fixing the unit circle: omega(z,p) / (-conj(p) omega(z, 1/conj(p))).
/// Equals the Blaschke factor m(z,p) on the disk; finite as p -> 0.
Complex eta(const PrimeEvaluator& ev, Complex z, Complex p);

/// d/dz log eta(z, p).
Complex eta_log_derivative(const PrimeEvaluator& ev, Complex z, Complex p);

/// Slit map sending boundary l to the unit circle; l = 0 is eta itself.
/// For l >= 1: sqrt((phi_l(p) - q_l)/(p - q_l)) omega(z,p) / omega(z, phi_l(p)), principal root.
Complex eta_l(const PrimeEvaluator& ev, int l, Complex z, Complex p);

Complex eta_l_log_derivative(const PrimeEvaluator& ev, int l, Complex z, Complex p);

struct SlitRadius {
  double radius = 0.0;
  /// Max | |eta_l(w,p)| - radius | over the samples.
  double deviation = 0.0;
};

/// Modulus of eta_l(., p) on boundary i != l: mean over `samples` points.
/// Throws NumericalError when the deviation exceeds `tol`.
SlitRadius slit_radius(const PrimeEvaluator& ev, int l, int i, Complex p, int samples = 64, double tol = 1e-6);

/// prod over enumerated words theta of m(theta(z), p) / m(theta(1), p).
Complex eta_via_mobius_product(const CircularDomain& d, const WordEnumeration& e, Complex z, Complex p);

/// |exp(-2 pi i v_j(z)) eta(z,p) - k eta_j(z,p)| with k fixed at the reference point z0.
double eta_j_relation_residual(const PrimeEvaluator& ev, const IntegralsFirstKind& v, int j, Complex z, Complex p,
                               Complex z0);
/// The constant k of the relation above.
Complex eta_j_relation_constant(const PrimeEvaluator& ev, const IntegralsFirstKind& v, int j, Complex p, Complex z0);

}  // namespace circmap
