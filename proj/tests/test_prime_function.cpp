#include <doctest.h>

#include <cmath>
#include <random>

#include "circmap/function_theory.hpp"
#include "circmap/prime_function.hpp"

using namespace circmap;

namespace {

const CircularDomain kAnnulus({{{0.0, 0.0}, 0.25}});
const CircularDomain kTriply({{{-0.5, 0.0}, 0.1}, {{0.5, 0.0}, 0.1}});

// Scalar product for the concentric annulus, coded without any word machinery.
Complex annulus_omega(double r, Complex z, Complex y, int terms) {
  Complex out = z - y;
  double q = 1.0;
  for (int k = 1; k <= terms; ++k) {
    q *= r * r;
    out *= (z - q * y) * (y - q * z) / ((z - q * z) * (y - q * y));
  }
  return out;
}

Complex random_point(const CircularDomain& d, std::mt19937& rng, double margin) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  while (true) {
    const Complex z{uni(rng), uni(rng)};
    if (d.contains(z, margin)) return z;
  }
}

}  // namespace

TEST_CASE("disk prime function is z - y") {
  const PrimeEvaluator ev(CircularDomain{});
  CHECK(ev.omega(0.3, 0.1) == Complex{0.3 - 0.1});
  CHECK(std::abs(ev.omega(0.3, 0.1) - 0.2) < 1e-16);
  const auto [r1, r2] = symmetry_residuals(ev, 0.5, Complex{0.0, 0.3});
  CHECK(r1 == 0.0);
  CHECK(r2 == 0.0);
}

TEST_CASE("annulus prime function matches the scalar product") {
  const PrimeEvaluator ev(kAnnulus, 8);
  CHECK(std::abs(ev.omega(0.7, 0.4) - annulus_omega(0.25, 0.7, 0.4, 8)) < 1e-10);
  std::mt19937 rng(21);
  for (int i = 0; i < 20; ++i) {
    const Complex z = random_point(kAnnulus, rng, 0.0);
    const Complex y = random_point(kAnnulus, rng, 0.0);
    const Complex ref = annulus_omega(0.25, z, y, 8);
    CHECK(std::abs(ev.omega(z, y) - ref) < 1e-10 * std::max(1.0, std::abs(ref)));
  }
  const PrimeEvaluator ev6(kAnnulus, 6);
  CHECK(symmetry_residuals(ev6, 0.7, 0.4).first < 1e-9);
}

TEST_CASE("zero at y and unit derivative") {
  const PrimeEvaluator ev(kTriply, 5);
  std::mt19937 rng(22);
  for (int i = 0; i < 10; ++i) {
    const Complex y = random_point(kTriply, rng, 0.01);
    CHECK(std::abs(ev.omega(y, y)) == 0.0);
    const Complex z = y + Complex{1e-6, 0.0};
    CHECK(std::abs(ev.omega(z, y) / (z - y) - 1.0) < 1e-5);
    const auto [r1, r2] = symmetry_residuals(ev, z + 0.01, y);
    CHECK(r2 < 1e-12 * std::max(1.0, std::abs(ev.omega(z + 0.01, y))));
    CHECK(r1 < 1e-8);
  }
}

TEST_CASE("log derivative against finite differences") {
  const PrimeEvaluator ev(kTriply, 4);
  std::mt19937 rng(23);
  const double h = 1e-6;
  for (int i = 0; i < 10; ++i) {
    const Complex z = random_point(kTriply, rng, 0.01);
    const Complex y = random_point(kTriply, rng, 0.01);
    if (std::abs(z - y) < 0.05) continue;
    const Complex fd = (std::log(ev.omega(z + h, y) / ev.omega(z - h, y))) / (2.0 * h);
    CHECK(std::abs(ev.omega_log_derivative(z, y) - fd) < 1e-6 * (1.0 + std::abs(fd)));
  }
}

TEST_CASE("half-set choice does not matter") {
  const PrimeEvaluator ev(kTriply, 6);
  const PrimeEvaluator mirrored(kTriply, 6, true);
  std::mt19937 rng(24);
  for (int i = 0; i < 10; ++i) {
    const Complex z = random_point(kTriply, rng, 0.0);
    const Complex y = random_point(kTriply, rng, 0.0);
    const Complex a = ev.omega(z, y);
    CHECK(std::abs(a - mirrored.omega(z, y)) < 1e-10 * std::abs(a));
  }
}

TEST_CASE("no spurious zeros on a grid") {
  const PrimeEvaluator ev(kTriply, 5);
  const Complex y{0.1, 0.3};
  int checked = 0;
  for (int a = -19; a <= 19; ++a) {
    for (int b = -19; b <= 19; ++b) {
      const Complex z{a / 20.0, b / 20.0};
      if (!kTriply.contains(z, 0.01) || std::abs(z - y) < 0.02) continue;
      CHECK(std::abs(ev.omega(z, y)) > 1e-3);
      ++checked;
    }
  }
  CHECK(checked > 500);
}

TEST_CASE("singular evaluation is reported") {
  const PrimeEvaluator ev(kAnnulus, 3);
  CHECK_THROWS_AS(ev.omega(0.0, 0.5), NumericalError);
}

TEST_CASE("functional equation") {
  {
    const auto m = solve_harmonic_measures(kAnnulus, 24, 256);
    const auto v = integrals_first_kind(m);
    const PrimeEvaluator ev(kAnnulus, 6);
    CHECK(functional_equation_residual(ev, 0.6, Complex{0.0, 0.4}, 1, v) < 1e-6);
  }
  {
    const auto m = solve_harmonic_measures(kTriply, 24, 256);
    const auto v = integrals_first_kind(m);
    double prev = 1e300;
    for (int L : {2, 4, 6}) {
      const PrimeEvaluator ev(kTriply, L);
      const double res = std::max(functional_equation_residual(ev, Complex{0.1, 0.2}, Complex{-0.2, 0.5}, 1, v),
                                  functional_equation_residual(ev, Complex{0.1, 0.2}, Complex{-0.2, 0.5}, 2, v));
      CHECK(res < prev);
      prev = res;
    }
    const PrimeEvaluator ev5(kTriply, 5);
    CHECK(functional_equation_residual(ev5, Complex{0.1, 0.2}, Complex{-0.2, 0.5}, 1, v) < 1e-6);

    // Near an inner circle the shifted point needs one more letter.
    const PrimeEvaluator ev6(kTriply, 6);
    const Complex near{-0.5, 0.115};
    const double plain = functional_equation_residual(ev5, near, Complex{-0.2, 0.5}, 1, v);
    const double shifted = functional_equation_residual(ev5, ev6, near, Complex{-0.2, 0.5}, 1, v);
    CHECK(shifted < 1e-6);
    CHECK(shifted < plain);
  }
  const PrimeEvaluator disk(CircularDomain{});
  const auto m0 = solve_harmonic_measures(CircularDomain{}, 4, 16);
  CHECK(functional_equation_residual(disk, 0.1, 0.2, 1, integrals_first_kind(m0)) == 0.0);
}
