#include <doctest.h>

#include <cmath>
#include <random>

#include "circmap/slit_maps.hpp"

using namespace circmap;

namespace {

const CircularDomain kAnnulus({{{0.0, 0.0}, 0.25}});
const CircularDomain kTriply({{{-0.5, 0.0}, 0.1}, {{0.5, 0.0}, 0.1}});
const CircularDomain kOffAxis({{{-0.3, 0.2}, 0.1}, {{0.4, -0.1}, 0.15}});

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

TEST_CASE("disk slit map is the Blaschke factor") {
  const PrimeEvaluator ev(CircularDomain{});
  CHECK(std::abs(eta(ev, 0.5, 0.2) - 1.0 / 3.0) < 1e-15);
  std::mt19937 rng(31);
  for (int i = 0; i < 20; ++i) {
    const Complex z = random_point(CircularDomain{}, rng, 0.0);
    const Complex p = random_point(CircularDomain{}, rng, 0.0);
    CHECK(std::abs(eta(ev, z, p) - blaschke_factor(z, p)) < 1e-15);
    CHECK(std::abs(eta_via_mobius_product(CircularDomain{}, ev.enumeration(), z, p) -
                   blaschke_factor(z, p) / blaschke_factor(1.0, p)) < 1e-15);
  }
  CHECK(std::abs(eta(ev, 0.3, 0.0) - 0.3) < 1e-16);
  CHECK(std::abs(eta_via_mobius_product(CircularDomain{}, ev.enumeration(), 0.5, 0.2) - 1.0 / 3.0) < 1e-15);
  CHECK_THROWS_AS(slit_radius(ev, 0, 1, 0.3), DomainError);
}

TEST_CASE("zeros, normalization and boundary moduli") {
  const PrimeEvaluator ev(kAnnulus, 8);
  for (int s = 0; s < 64; ++s) {
    const Complex w = std::polar(1.0, 2.0 * kPi * s / 64);
    CHECK(std::abs(std::abs(eta(ev, w, 0.5)) - 1.0) < 1e-8);
    CHECK(std::abs(std::abs(eta_l(ev, 1, std::polar(0.25, 2.0 * kPi * s / 64), 0.6)) - 1.0) < 1e-7);
  }
  CHECK(std::abs(eta(ev, 1.0, 0.5) - 1.0) < 1e-10);

  std::mt19937 rng(32);
  for (const auto& d : {kTriply, kOffAxis}) {
    const PrimeEvaluator e(d);
    for (int i = 0; i < 5; ++i) {
      const Complex p = random_point(d, rng, 0.02);
      CHECK(std::abs(eta(e, p, p)) == 0.0);
      for (int l = 0; l <= d.genus(); ++l) {
        CHECK(std::abs(eta_l(e, l, p, p)) == 0.0);
        for (int i2 = 0; i2 <= d.genus(); ++i2) {
          double mean = 0.0, sq = 0.0;
          for (int s = 0; s < 64; ++s) {
            const double m = std::abs(eta_l(e, l, d.boundary_point(i2, 2.0 * kPi * s / 64), p));
            mean += m;
            sq += m * m;
          }
          mean /= 64;
          const double stddev = std::sqrt(std::max(0.0, sq / 64 - mean * mean));
          CHECK(stddev < 1e-6);
          if (i2 == l) CHECK(std::abs(mean - 1.0) < 1e-6);
        }
      }
      for (int k = 0; k < 10; ++k) {
        const Complex z = random_point(d, rng, 1e-3);
        for (int l = 0; l <= d.genus(); ++l) CHECK(std::abs(eta_l(e, l, z, p)) < 1.0);
      }
    }
  }
  const PrimeEvaluator tri(kTriply);
  CHECK(std::abs(eta(tri, 1.0, 0.2) - 1.0) < 1e-10);
  CHECK(std::abs(eta(tri, 1.0, -0.7) - 1.0) < 1e-10);
}

TEST_CASE("eta_0 and eta are the same map") {
  const PrimeEvaluator ev(kOffAxis);
  std::mt19937 rng(33);
  const Complex p = random_point(kOffAxis, rng, 0.02);
  for (int i = 0; i < 20; ++i) {
    const Complex z = random_point(kOffAxis, rng, 0.0);
    CHECK(std::abs(eta_l(ev, 0, z, p) - eta(ev, z, p)) < 1e-12);
  }
}

TEST_CASE("slit radius") {
  const PrimeEvaluator ev(kAnnulus, 8);
  const SlitRadius rho = slit_radius(ev, 0, 1, 0.5);
  CHECK(rho.radius > 0.0);
  CHECK(rho.radius < 1.0);
  // Oracle: scalar annulus product, eta = omega(z,p) / (-conj(p) omega(z, 1/conj p)).
  const Complex w = std::polar(0.25, 0.7);
  const double oracle = std::abs(annulus_omega(0.25, w, 0.5, 12) / (0.5 * annulus_omega(0.25, w, 2.0, 12)));
  CHECK(std::abs(rho.radius - oracle) < 1e-10);
  // On the annulus the slit radius is |p|.
  CHECK(std::abs(rho.radius - 0.5) < 1e-10);

  const PrimeEvaluator tri(kTriply);
  for (int l = 0; l <= 2; ++l) {
    for (int i = 0; i <= 2; ++i) {
      if (i == l) continue;
      const SlitRadius r = slit_radius(tri, l, i, Complex{0.1, 0.3});
      CHECK(r.radius > 0.0);
      CHECK(r.radius < 1.0);
    }
  }
  CHECK_THROWS_AS(slit_radius(tri, 1, 1, 0.1), DomainError);
}

TEST_CASE("Mobius product agrees with the prime-function ratio") {
  {
    const PrimeEvaluator ev(kAnnulus, 6);
    const Complex z{0.0, 0.7};
    const Complex a = eta_via_mobius_product(kAnnulus, ev.enumeration(), z, 0.4);
    CHECK(std::abs(a - eta(ev, z, 0.4) / eta(ev, 1.0, 0.4)) < 1e-8);
  }
  {
    const PrimeEvaluator ev(kTriply, 5);
    std::mt19937 rng(34);
    for (int i = 0; i < 10; ++i) {
      const Complex z = random_point(kTriply, rng, 0.0);
      const Complex p = random_point(kTriply, rng, 0.02);
      const Complex a = eta_via_mobius_product(kTriply, ev.enumeration(), z, p);
      CHECK(std::abs(a - eta(ev, z, p) / eta(ev, 1.0, p)) < 1e-6);
    }
  }
}

TEST_CASE("eta and eta_j differ by exp(2 pi i v_j)") {
  const auto check_domain = [](const CircularDomain& d, double tol) {
    const auto m = solve_harmonic_measures(d, 24, 256);
    const auto v = integrals_first_kind(m);
    const PrimeEvaluator ev(d);
    std::mt19937 rng(35);
    const Complex p = random_point(d, rng, 0.05);
    const Complex z0 = random_point(d, rng, 0.05);
    for (int j = 1; j <= d.genus(); ++j) {
      for (int i = 0; i < 10; ++i) {
        const Complex z = random_point(d, rng, 0.0);
        CHECK(eta_j_relation_residual(ev, v, j, z, p, z0) < tol);
      }
      const Complex k = eta_j_relation_constant(ev, v, j, p, z0);
      CHECK(std::abs(std::abs(k) - 1.0 / slit_radius(ev, j, 0, p).radius) < 1e-6);
      CHECK(std::abs(std::abs(k) - std::exp(-v.combination()(j - 1, j - 1)) * slit_radius(ev, 0, j, p).radius) < 1e-6);
    }
  };
  check_domain(kAnnulus, 1e-7);
  check_domain(kTriply, 1e-7);
  const PrimeEvaluator disk(CircularDomain{});
  const auto m0 = solve_harmonic_measures(CircularDomain{}, 4, 16);
  CHECK(eta_j_relation_residual(disk, integrals_first_kind(m0), 1, 0.1, 0.2, 0.3) == 0.0);
}

TEST_CASE("injectivity spot check") {
  const PrimeEvaluator ev(kOffAxis);
  std::mt19937 rng(36);
  const Complex p = random_point(kOffAxis, rng, 0.05);
  std::vector<Complex> images;
  for (int i = 0; i < 30; ++i) images.push_back(eta(ev, random_point(kOffAxis, rng, 1e-3), p));
  for (std::size_t a = 0; a < images.size(); ++a) {
    for (std::size_t b = a + 1; b < images.size(); ++b) CHECK(std::abs(images[a] - images[b]) > 1e-8);
  }
}

TEST_CASE("log derivatives against finite differences") {
  const PrimeEvaluator ev(kOffAxis);
  std::mt19937 rng(37);
  const double h = 1e-6;
  for (int i = 0; i < 5; ++i) {
    const Complex p = random_point(kOffAxis, rng, 0.05);
    const Complex z = random_point(kOffAxis, rng, 0.02);
    if (std::abs(z - p) < 0.05) continue;
    for (int l = 0; l <= 2; ++l) {
      const Complex fd = std::log(eta_l(ev, l, z + h, p) / eta_l(ev, l, z - h, p)) / (2.0 * h);
      CHECK(std::abs(eta_l_log_derivative(ev, l, z, p) - fd) < 1e-6 * (1.0 + std::abs(fd)));
    }
  }
}

TEST_CASE("shrinking circle degenerates to the smaller domain") {
  const CircularDomain reference({{{-0.5, 0.0}, 0.15}});
  const PrimeEvaluator ref(reference);
  const std::vector<Complex> zs{{0.0, 0.5}, {-0.2, -0.3}, {0.1, 0.1}, {0.8, 0.0}};
  const Complex p{-0.1, 0.4};
  double prev = 1e300;
  for (double r : {0.1, 0.05, 0.025}) {
    const CircularDomain d({{{-0.5, 0.0}, 0.15}, {{0.4, 0.0}, r}});
    const PrimeEvaluator ev(d);
    double diff = 0.0;
    for (const auto& z : zs) diff = std::max(diff, std::abs(eta(ev, z, p) - eta(ref, z, p)));
    CHECK(diff < prev);
    prev = diff;
  }
  CHECK(prev < 0.05);
}
