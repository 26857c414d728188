#include <doctest.h>

#include <cmath>
#include <random>

#include <json.hpp>

#include "circmap/caratheodory.hpp"
#include "oracles.hpp"

using namespace circmap;

namespace {

const CircularDomain kDisk;
const CircularDomain kAnnulus({{{0.0, 0.0}, 0.25}});
const CircularDomain kTriply({{{-0.5, 0.0}, 0.1}, {{0.5, 0.0}, 0.1}});

struct Setup {
  HarmonicModel m;
  IntegralsFirstKind v;
  PrimeEvaluator ev;
  DistanceSolver solver;

  Setup(const CircularDomain& d, int L) : m(solve_harmonic_measures(d)), v(m), ev(d, L), solver(m, ev, v) {}
};

const Setup& disk() {
  static const Setup s(kDisk, 0);
  return s;
}

const Setup& annulus() {
  static const Setup s(kAnnulus, 6);
  return s;
}

const Setup& triply() {
  static const Setup s(kTriply, 5);
  return s;
}

// Golden-section maximum of |Wang-Yin(z)| over the second zero 0.25/|a| e^{it}.
double annulus_oracle(Complex a, Complex z) {
  const double rho = 0.25 / std::abs(a);
  auto f = [&](double t) { return std::abs(oracle::wang_yin(0.25, {a, std::polar(rho, t)}, 1, z, 14)); };
  int best = 0;
  const int n = 720;
  for (int k = 1; k < n; ++k) {
    if (f(2.0 * kPi * k / n) > f(2.0 * kPi * best / n)) best = k;
  }
  double lo = 2.0 * kPi * (best - 1) / n;
  double hi = 2.0 * kPi * (best + 1) / n;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 80; ++it) {
    const double x1 = hi - g * (hi - lo);
    const double x2 = lo + g * (hi - lo);
    if (f(x1) > f(x2)) {
      hi = x2;
    } else {
      lo = x1;
    }
  }
  return f(0.5 * (lo + hi));
}

}  // namespace

TEST_CASE("disk distances are pseudo-hyperbolic") {
  const DistanceSolver& s = disk().solver;
  CHECK(s.distance(0.0, 0.5).value == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(s.distance(0.5, 0.2).value == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(caratheodory_from_mobius(s.distance(0.0, 0.5).value) == doctest::Approx(std::atanh(0.5)));
  CHECK(s.distance(0.3, 0.3).value == 0.0);
}

TEST_CASE("annulus distance matches the Wang-Yin sweep") {
  const DistanceSolver& s = annulus().solver;
  for (auto [a, z] : {std::pair<Complex, Complex>{0.5, -0.5}, {0.5, {0.1, 0.6}}, {{0.3, -0.3}, {-0.2, 0.7}}}) {
    const DistanceResult r = s.distance(a, z);
    CHECK_FALSE(r.stagnated);
    CHECK(r.value == doctest::Approx(annulus_oracle(a, z)).epsilon(1e-6));
    REQUIRE(r.argmax.size() == 1);
    CHECK(std::abs(a * r.argmax[0]) == doctest::Approx(0.25).epsilon(1e-8));
  }
}

TEST_CASE("distance symmetry and triangle inequality") {
  const DistanceSolver& s = triply().solver;
  const Complex a{0.0, 0.4};
  const Complex b{-0.2, -0.5};
  const Complex c{0.6, 0.3};
  const double ab = s.distance(a, b).value;
  CHECK(ab == doctest::Approx(s.distance(b, a).value).epsilon(2e-4));
  const double ca = caratheodory_from_mobius(s.distance(a, c).value);
  const double cb = caratheodory_from_mobius(ab);
  const double cc = caratheodory_from_mobius(s.distance(b, c).value);
  CHECK(ca <= cb + cc + 1e-9);
  CHECK(cb <= ca + cc + 1e-9);
  CHECK(cc <= ca + cb + 1e-9);
}

TEST_CASE("refine agrees with the multistart search") {
  const DistanceSolver& s = triply().solver;
  const DistanceResult full = s.distance(0.2, {-0.1, 0.5});
  const DistanceResult local = s.refine(0.2, {-0.1, 0.52}, full.chart);
  const DistanceResult direct = s.distance(0.2, {-0.1, 0.52});
  CHECK(local.value == doctest::Approx(direct.value).epsilon(1e-8));
  CHECK(s.modulus(0.2, full.argmax, {-0.1, 0.5}) == doctest::Approx(full.value).epsilon(1e-12));
}

TEST_CASE("distance errors") {
  const DistanceSolver& s = annulus().solver;
  CHECK_THROWS_AS(s.distance(0.1, 0.5), DomainError);
  CHECK_THROWS_AS(s.distance(0.5, 1.5), DomainError);
  CHECK_THROWS_AS(caratheodory_from_mobius(1.0), DomainError);
  CHECK_THROWS_AS(product_distance(0.2, Complex{1.0, 0.0}), DomainError);
}

TEST_CASE("product distance on G x D") {
  CHECK(product_distance(0.3, 0.5) == doctest::Approx(std::atanh(0.5)));
  CHECK(product_distance(0.9, 0.5) == doctest::Approx(0.9));
  CHECK(product_distance(0.0, 0.0) == 0.0);
}

TEST_CASE("disk ball raster area") {
  const BallRaster r = ball_raster(disk().solver, 0.0, 0.5, BoundingBox{}, 120, 120);
  CHECK(r.components == 1);
  int inside = 0;
  int ball = 0;
  for (double v : r.values) {
    if (std::isnan(v)) continue;
    ++inside;
    if (v < 0.5) ++ball;
  }
  CHECK(static_cast<double>(ball) / inside == doctest::Approx(0.25).epsilon(0.03));
  CHECK(r.at(0, 0) != r.at(0, 0));
}

TEST_CASE("annulus rasters nest and stay connected") {
  BallRaster r = ball_raster(annulus().solver, 0.5, 0.6, BoundingBox{}, 40, 40);
  CHECK(r.components == 1);
  const std::vector<int> small = r.labels;
  for (double t : {0.8, 0.95}) {
    label_components(r, t);
    CHECK(r.components == 1);
    for (std::size_t k = 0; k < small.size(); ++k) {
      if (small[k] >= 0) CHECK(r.labels[k] >= 0);
    }
  }
}

TEST_CASE("raster ball lies inside every single-map ball") {
  const Setup& t = triply();
  const Complex base{0.0, 0.3};
  const BallRaster r = ball_raster(t.solver, base, 0.8, BoundingBox{-0.9, -0.9, 0.9, 0.9}, 8, 8);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
  int checked = 0;
  for (int trial = 0; trial < 4; ++trial) {
    ChartPoint chart{{1, 2}, {ang(rng), ang(rng)}, {0.05, 0.05}};
    std::vector<Complex> P;
    try {
      P = t.solver.chart_points(base, chart);
    } catch (const NumericalError&) {
      continue;
    }
    for (int j = 0; j < r.ny; ++j) {
      for (int i = 0; i < r.nx; ++i) {
        if (std::isnan(r.at(i, j))) continue;
        CHECK(r.at(i, j) >= t.solver.modulus(base, P, r.pixel_center(i, j)) - 1e-9);
        ++checked;
      }
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("raster errors and csv") {
  CHECK_THROWS_AS(ball_raster(annulus().solver, 0.5, 0.5, BoundingBox{}, 1, 1), DomainError);
  CHECK_THROWS_AS(ball_raster(annulus().solver, 0.5, 0.5, BoundingBox{}, 0, 4), DomainError);
  const BallRaster a = ball_raster(annulus().solver, 0.5, 0.7, BoundingBox{}, 8, 6);
  const BallRaster b = ball_raster(annulus().solver, 0.5, 0.7, BoundingBox{}, 8, 6);
  const std::string csv = raster_to_csv(a);
  CHECK(csv == raster_to_csv(b));
  CHECK(csv.rfind("# bbox -1 -1 1 1\n# resolution 8 6\n# center 0.5 0\n# threshold 0.69999999999999996\n", 0) == 0);
  CHECK(csv.find("NaN,") != std::string::npos);
  int rows = 0;
  for (char c : csv) rows += c == '\n';
  CHECK(rows == 4 + 6);
}

TEST_CASE("component labelling and disk test") {
  BallRaster r;
  r.nx = 20;
  r.ny = 10;
  r.values.assign(200, 1.0);
  for (int j = 1; j < 9; ++j) {
    for (int i = 1; i < 9; ++i) r.values[static_cast<std::size_t>(j * 20 + i)] = 0.1;
    for (int i = 12; i < 14; ++i) r.values[static_cast<std::size_t>(j * 20 + i)] = 0.1;
  }
  r.values[0] = std::nan("");
  label_components(r, 0.5);
  CHECK(r.components == 2);
  CHECK(r.label_at(2, 2) != r.label_at(12, 2));
  CHECK(component_contains_disk(r, r.label_at(2, 2), 3.0));
  CHECK_FALSE(component_contains_disk(r, r.label_at(12, 2), 3.0));
  CHECK(r.label_at(0, 0) == -1);
}

TEST_CASE("Wang-Yin evaluation") {
  const std::vector<Complex> zeros{0.5, -0.5};
  const Complex ref = oracle::wang_yin(0.25, zeros, 1, 1.0);
  for (Complex z : {Complex{0.4, 0.3}, Complex{-0.7, 0.1}, Complex{0.0, -0.9}}) {
    CHECK(std::abs(wang_yin_eval(0.25, zeros, 1, z) - oracle::wang_yin(0.25, zeros, 1, z) / ref) < 1e-12);
  }
  CHECK(std::abs(std::abs(wang_yin_eval(0.25, zeros, 1, std::polar(1.0, 0.7))) - 1.0) < 1e-12);
  CHECK_THROWS_AS(wang_yin_eval(0.25, {0.5, 0.6}, 1, 0.4), DomainError);
  CHECK_THROWS_AS(wang_yin_eval(0.25, {0.1}, 1, 0.4), DomainError);
}

TEST_CASE("witness search reports proxies") {
  WitnessOptions o;
  o.radii = {0.1};
  o.base_offsets = {0.04};
  o.diagnostic_raster = false;
  o.distance.seeds = 3;
  const Witness w = find_disconnected_ball(o);
  CHECK(w.proxies.size() == 10);
  REQUIRE(w.screenings.size() == 1);
  for (const BetaProxy& b : w.proxies) {
    CHECK(b.beta1_min > 0.0);
    CHECK(b.beta1_min <= b.beta1_max);
    CHECK(b.beta2_min <= b.beta2_max);
  }
  const auto j = nlohmann::json::parse(witness_to_json(w));
  CHECK(j["beta_proxies"].size() == 10);
  const BetaProxy& tight = w.proxies.back();
  CHECK(tight.beta1_min * tight.beta2_min == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(tight.beta1_max * tight.beta2_max == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(j.contains("found"));
}
