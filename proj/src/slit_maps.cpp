#include "circmap/slit_maps.hpp"

#include <cmath>

namespace circmap {

namespace {

Complex m_ext(const ExtendedComplex& z, Complex p) {
  if (!z.is_finite()) return -1.0 / std::conj(p);
  return blaschke_factor(z.value, p);
}

void require_inner_index(const PrimeEvaluator& ev, int l) {
  if (l < 0 || l > ev.domain().genus()) throw DomainError("boundary index out of range: " + std::to_string(l));
}

}  // namespace

Complex eta(const PrimeEvaluator& ev, Complex z, Complex p) {
  return -ev.omega_projective(z, p, Complex{1.0}) / ev.omega_projective(z, Complex{1.0}, std::conj(p));
}

Complex eta_log_derivative(const PrimeEvaluator& ev, Complex z, Complex p) {
  return ev.omega_log_derivative_projective(z, p, Complex{1.0}) -
         ev.omega_log_derivative_projective(z, Complex{1.0}, std::conj(p));
}

Complex eta_l(const PrimeEvaluator& ev, int l, Complex z, Complex p) {
  require_inner_index(ev, l);
  if (l == 0) return eta(ev, z, p);
  const Complex q = ev.domain().boundary(l).center;
  const Complex phi = reflect(ev.domain(), l, p);
  return std::sqrt((phi - q) / (p - q)) * ev.omega(z, p) / ev.omega(z, phi);
}

Complex eta_l_log_derivative(const PrimeEvaluator& ev, int l, Complex z, Complex p) {
  require_inner_index(ev, l);
  if (l == 0) return eta_log_derivative(ev, z, p);
  const Complex phi = reflect(ev.domain(), l, p);
  return ev.omega_log_derivative(z, p) - ev.omega_log_derivative(z, phi);
}

SlitRadius slit_radius(const PrimeEvaluator& ev, int l, int i, Complex p, int samples, double tol) {
  const int g = ev.domain().genus();
  if (i < 0 || i > g || i == l) throw DomainError("slit_radius needs a boundary index i != l in 0..g");
  require_inner_index(ev, l);
  std::vector<double> mods;
  double mean = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double mod = std::abs(eta_l(ev, l, ev.domain().boundary_point(i, 2.0 * kPi * (s + 0.5) / samples), p));
    mods.push_back(mod);
    mean += mod;
  }
  mean /= samples;
  double dev = 0.0;
  for (double m : mods) dev = std::max(dev, std::abs(m - mean));
  if (dev > tol) {
    throw NumericalError("slit radius: modulus varies by " + std::to_string(dev) +
                         " on the boundary circle; increase the word length");
  }
  return {mean, dev};
}

Complex eta_via_mobius_product(const CircularDomain& d, const WordEnumeration& e, Complex z, Complex p) {
  const auto maps = realize_all(d, e);
  Complex prod{1.0};
  for (const auto& t : maps) {
    prod *= m_ext(t.apply(z), p) / m_ext(t.apply(Complex{1.0}), p);
  }
  return prod;
}

Complex eta_j_relation_constant(const PrimeEvaluator& ev, const IntegralsFirstKind& v, int j, Complex p, Complex z0) {
  return std::exp(-2.0 * kPi * kI * v.v(j, z0)) * eta(ev, z0, p) / eta_l(ev, j, z0, p);
}

double eta_j_relation_residual(const PrimeEvaluator& ev, const IntegralsFirstKind& v, int j, Complex z, Complex p,
                               Complex z0) {
  if (ev.domain().genus() == 0) return 0.0;
  const Complex k = eta_j_relation_constant(ev, v, j, p, z0);
  return std::abs(std::exp(-2.0 * kPi * kI * v.v(j, z)) * eta(ev, z, p) - k * eta_l(ev, j, z, p));
}

}  // namespace circmap
