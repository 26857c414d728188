#include <doctest.h>

#include <cmath>
#include <random>

#include "circmap/function_theory.hpp"

using namespace circmap;

namespace {

const CircularDomain kAnnulus({{{0.0, 0.0}, 0.25}});
const CircularDomain kTriply({{{-0.5, 0.0}, 0.1}, {{0.5, 0.0}, 0.1}});
const CircularDomain kTriplyWide({{{-0.5, 0.0}, 0.15}, {{0.5, 0.0}, 0.15}});

// Walk-on-spheres estimate of the harmonic measure of boundary j at z.
double walk_on_spheres(const CircularDomain& d, int j, Complex z, int walks, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  int hits = 0;
  for (int w = 0; w < walks; ++w) {
    Complex x = z;
    while (true) {
      const auto [dist, idx] = d.nearest_boundary(x);
      if (dist < 1e-4) {
        if (idx == j) ++hits;
        break;
      }
      x += std::polar(dist, angle(rng));
    }
  }
  return static_cast<double>(hits) / walks;
}

Complex random_point(const CircularDomain& d, std::mt19937& rng, double margin) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  while (true) {
    const Complex z{uni(rng), uni(rng)};
    if (d.contains(z, margin)) return z;
  }
}

}  // namespace

TEST_CASE("annulus harmonic measure matches log|z|/log r") {
  const auto m = solve_harmonic_measures(kAnnulus, 24, 256);
  CHECK(m.residual() < 1e-12);
  CHECK(std::abs(m.u(1, 0.5) - 0.5) < 1e-8);
  std::mt19937 rng(1);
  for (int i = 0; i < 20; ++i) {
    const Complex z = random_point(kAnnulus, rng, 0.0);
    CHECK(std::abs(m.u(1, z) - std::log(std::abs(z)) / std::log(0.25)) < 1e-8);
  }
  CHECK(std::abs(m.u(1, std::polar(0.25, 1.0)) - 1.0) <= m.residual() + 1e-14);
}

TEST_CASE("boundary values, range and partition of unity") {
  const auto m = solve_harmonic_measures(kTriply, 24, 256);
  CHECK(m.residual() < 1e-8);
  for (int l = 0; l <= 2; ++l) {
    for (int s = 0; s < 32; ++s) {
      const Complex w = kTriply.boundary_point(l, 0.2 * s + 0.05);
      for (int j = 0; j <= 2; ++j) CHECK(std::abs(m.u(j, w) - (j == l ? 1.0 : 0.0)) < 1e-8);
    }
  }
  std::mt19937 rng(2);
  for (int i = 0; i < 40; ++i) {
    const Complex z = random_point(kTriply, rng, 1e-3);
    double total = 0.0;
    for (int j = 0; j <= 2; ++j) {
      const double u = m.u(j, z);
      CHECK(u > 0.0);
      CHECK(u < 1.0);
      total += u;
    }
    CHECK(std::abs(total - 1.0) < 1e-14);
  }
}

TEST_CASE("harmonic measure at the origin agrees with walk-on-spheres") {
  const auto m = solve_harmonic_measures(kTriplyWide, 24, 256);
  const double u1 = m.u(1, 0.0);
  const double u2 = m.u(2, 0.0);
  CHECK(u1 > 0.0);
  CHECK(u2 > 0.0);
  CHECK(u1 + u2 < 1.0);
  CHECK(std::abs(u1 - u2) < 1e-10);
  CHECK(std::abs(walk_on_spheres(kTriplyWide, 1, 0.0, 20000, 5) - u1) < 2e-2);
  CHECK(std::abs(walk_on_spheres(kTriplyWide, 2, 0.0, 20000, 6) - u2) < 2e-2);
}

TEST_CASE("gradients against finite differences") {
  const auto m = solve_harmonic_measures(kTriply, 24, 256);
  std::mt19937 rng(4);
  const double h = 1e-5;
  for (int i = 0; i < 10; ++i) {
    const Complex z = random_point(kTriply, rng, 0.02);
    for (int j = 0; j <= 2; ++j) {
      const auto g = m.grad_u(j, z);
      const double fx = (m.u(j, z + h) - m.u(j, z - h)) / (2 * h);
      const double fy = (m.u(j, z + Complex{0.0, h}) - m.u(j, z - Complex{0.0, h})) / (2 * h);
      CHECK(std::abs(g[0] - fx) < 1e-6);
      CHECK(std::abs(g[1] - fy) < 1e-6);
    }
  }
}

TEST_CASE("normal derivatives have the Hopf sign") {
  const auto m = solve_harmonic_measures(kTriply, 24, 256);
  for (int j = 1; j <= 2; ++j) {
    for (int l = 0; l <= 2; ++l) {
      for (int s = 0; s < 16; ++s) {
        const Complex w = kTriply.boundary_point(l, 2.0 * kPi * s / 16);
        const double dn = m.normal_derivative(j, l, w);
        if (l == j) {
          CHECK(dn < 0.0);
        } else {
          CHECK(dn > 0.0);
        }
      }
    }
  }
  const Eigen::MatrixXd nd = normal_derivative_matrix(m, {Complex{-0.4, 0.0}, Complex{0.6, 0.0}});
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(nd);
  CHECK(std::abs(nd.determinant()) > 0.0);
  CHECK(svd.singularValues()(0) / svd.singularValues()(1) < 1e3);
}

TEST_CASE("mean value property") {
  const auto m = solve_harmonic_measures(kTriply, 24, 256);
  std::mt19937 rng(8);
  for (int i = 0; i < 20; ++i) {
    const Complex z = random_point(kTriply, rng, 0.05);
    const double rad = 0.8 * kTriply.nearest_boundary(z).first;
    double avg = 0.0;
    const int n = 256;
    for (int s = 0; s < n; ++s) avg += m.u(1, z + std::polar(rad, 2.0 * kPi * s / n));
    CHECK(std::abs(avg / n - m.u(1, z)) < 1e-8);
  }
}

TEST_CASE("integrals of the first kind on the annulus") {
  const auto m = solve_harmonic_measures(kAnnulus, 24, 256);
  const auto v = integrals_first_kind(m);
  std::mt19937 rng(9);
  for (int i = 0; i < 10; ++i) {
    const Complex z = random_point(kAnnulus, rng, 0.0);
    CHECK(std::abs(v.v(1, z) - std::log(z) / (2.0 * kPi * kI)) < 1e-9);
  }
  CHECK(std::abs(v.period(1, 1) - 1.0) < 1e-10);
  // Branch-tracked loop around the inner circle.
  std::vector<Complex> loop;
  for (int s = 0; s <= 64; ++s) loop.push_back(std::polar(0.5, 2.0 * kPi * s / 64));
  const auto vals = v.v_along(loop);
  CHECK(std::abs(vals.back()(0) - vals.front()(0) - 1.0) < 1e-10);

  const auto tau = period_matrix(v, kAnnulus);
  const Complex expected = std::log(0.0625) / (2.0 * kPi * kI);
  CHECK(std::abs(expected - Complex{0.0, 0.44127}) < 1e-5);
  CHECK(std::abs(tau.tau(0, 0) - expected) < 1e-7);
  CHECK(std::abs(v.tau()(0, 0) - expected) < 1e-10);
  CHECK(har_relation_residual(m, v, tau, 0.5) < 1e-7);
  CHECK(har_relation_residual(m, v, tau, std::polar(1.0, 0.3)) < 1e-7);
}

TEST_CASE("integrals of the first kind on a triply connected domain") {
  const auto m = solve_harmonic_measures(kTriply, 24, 256);
  const auto v = integrals_first_kind(m);
  for (int j = 1; j <= 2; ++j) {
    for (int i = 1; i <= 2; ++i) CHECK(std::abs(v.period(j, i) - (i == j ? 1.0 : 0.0)) < 1e-8);
  }
  CHECK(std::abs(v.v(1, 1.0)) < 1e-15);

  std::mt19937 rng(12);
  std::uniform_real_distribution<double> rad(0.9, 0.99), ang(0.0, 2.0 * kPi);
  for (int i = 0; i < 10; ++i) {
    const Complex z = std::polar(rad(rng), ang(rng));
    const Complex zr = 1.0 / std::conj(z);
    // Continue from z to its reflection, then compare with conj(v(z)).
    const Eigen::VectorXcd vz = v.v_all(z);
    const Eigen::VectorXcd vzr = vz + v.increment(z, zr);
    CHECK((vzr - vz.conjugate()).cwiseAbs().maxCoeff() < 1e-8);
  }

  const auto tau = period_matrix(v, kTriply);
  CHECK(std::abs(tau.tau(0, 1) - tau.tau(1, 0)) < 1e-7);
  CHECK(tau.tau.real().cwiseAbs().maxCoeff() < 1e-7);
  CHECK(tau.base_point_spread < 1e-7);
  CHECK((tau.tau - v.tau()).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(tau.tau.imag().minCoeff() > -1.0);
  for (int i = 0; i < 10; ++i) {
    const Complex z = random_point(kTriply, rng, 1e-3);
    CHECK(har_relation_residual(m, v, tau, z) < 1e-6);
  }
  CHECK(har_relation_residual(m, v, tau, std::polar(1.0, 2.0)) < 1e-7);
}

TEST_CASE("harmonic fit rejects bad input") {
  CHECK_THROWS_AS(solve_harmonic_measures(kTriply, 24, 50), DomainError);
  CHECK_THROWS_AS(solve_harmonic_measures(CircularDomain({{{0.5, 0.0}, 0.6}}), 8, 64), DomainError);
}
