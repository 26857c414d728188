#include "verification.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

namespace circmap::verify {

namespace {

const CircularDomain kDisk;
const CircularDomain kAnnulus({Circle{{0.0, 0.0}, 0.25}});
const CircularDomain kTriply({Circle{{-0.5, 0.0}, 0.1}, Circle{{0.5, 0.0}, 0.1}});

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void below(Criterion& c, const std::string& name, double measured, double tol) {
  c.checks.push_back({name, measured, tol, measured < tol});
}

void equal(Criterion& c, const std::string& name, double mismatches) {
  c.checks.push_back({name, mismatches, 0.0, mismatches == 0.0});
}

Complex random_point(const CircularDomain& d, std::mt19937_64& rng, double margin) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  while (true) {
    const Complex z{uni(rng), uni(rng)};
    if (d.contains(z, margin)) return z;
  }
}

std::vector<Complex> sample_points(const CircularDomain& d, std::uint64_t seed, int n, double margin) {
  std::mt19937_64 rng(seed);
  std::vector<Complex> out;
  for (int i = 0; i < n; ++i) out.push_back(random_point(d, rng, margin));
  return out;
}

// Random points for n - g zeros, completed by g zeros on normal lines near the inner circles.
ZeroConfig random_config(const HarmonicModel& m, std::mt19937_64& rng, const BoundaryDegree& nu) {
  const CircularDomain& d = m.domain();
  const int n = std::accumulate(nu.begin(), nu.end(), 0);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
  for (int attempt = 0; attempt < 5000; ++attempt) {
    std::vector<Complex> fixed;
    for (int k = 0; k < n - d.genus(); ++k) fixed.push_back(random_point(d, rng, 0.05));
    // The free point near circle l carries most of the remaining harmonic measure of that circle.
    bool reachable = true;
    for (int l = 1; l <= d.genus(); ++l) {
      double sum = 0.0;
      for (const Complex& p : fixed) sum += m.u(l, p);
      const double need = nu[static_cast<std::size_t>(l)] - sum;
      reachable = reachable && need > 0.05 && need < 0.95;
    }
    if (!reachable) continue;
    std::vector<Complex> guess;
    for (int l = 1; l <= d.genus(); ++l) {
      const Circle c = d.boundary(l);
      guess.push_back(c.center + 1.3 * c.radius * std::polar(1.0, ang(rng)));
    }
    try {
      std::vector<Complex> zeros = fixed;
      for (const Complex& z : complete_zeros(m, fixed, nu, guess)) zeros.push_back(z);
      return make_zero_config(m, zeros, nu);
    } catch (const NumericalError&) {
    } catch (const DomainError&) {
    }
  }
  throw NumericalError("no admissible random configuration found");
}

struct Setup {
  HarmonicModel m;
  IntegralsFirstKind v;
  PrimeEvaluator ev;

  Setup(const CircularDomain& d, int L) : m(solve_harmonic_measures(d)), v(m), ev(d, L) {}
};

int winding_mismatches(const std::function<Complex(Complex)>& f, const CircularDomain& d, const BoundaryDegree& nu) {
  int bad = 0;
  for (int l = 0; l <= d.genus(); ++l) bad += boundary_degree(f, d, l) != nu[static_cast<std::size_t>(l)];
  return bad;
}

}  // namespace

Oracles library_oracles() {
  return {[](double r, const std::vector<Complex>& zeros, int d, Complex z) { return wang_yin_eval(r, zeros, d, z); },
          [](const std::vector<Complex>& zeros, Complex z) { return blaschke_eval(zeros, z); }};
}

bool Criterion::passed() const {
  for (const Check& c : checks) {
    if (!c.pass) return false;
  }
  return !checks.empty();
}

Criterion disk_degeneration(const Oracles& o) {
  Timer t;
  Criterion c{1, "disk degeneration (g=0)", false, {}, {}, 0.0};
  const Setup s(kDisk, 0);
  const auto pts = sample_points(kDisk, 101, 40, 0.0);
  double eta_err = 0.0;
  double dist_err = 0.0;
  const DistanceSolver solver(s.m, s.ev, s.v);
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
    const Complex z = pts[i];
    const Complex p = pts[i + 1];
    eta_err = std::max(eta_err, std::abs(eta(s.ev, z, p) - (z - p) / (1.0 - std::conj(p) * z)));
    dist_err = std::max(dist_err, std::abs(solver.distance(p, z).value - std::abs((z - p) / (1.0 - std::conj(p) * z))));
  }
  below(c, "eta vs (z-p)/(1-conj(p)z)", eta_err, 1e-12);

  const std::vector<Complex> zeros{0.3, {-0.2, 0.4}, {0.1, -0.6}};
  const ProperMap f = build_proper_map(s.ev, s.v, make_zero_config(s.m, zeros, {3}));
  double map_err = 0.0;
  for (const Complex& z : pts) map_err = std::max(map_err, std::abs(f(z) - o.blaschke(zeros, z)));
  below(c, "proper map vs normalized Blaschke", map_err, 1e-12);
  below(c, "c* vs |m(z,a)|", dist_err, 1e-12);
  c.seconds = t.seconds();
  below(c, "runtime (s)", c.seconds, 1.0);
  return c;
}

Criterion annulus_oracle(const Oracles& o) {
  Timer t;
  Criterion c{2, "annulus oracle (r=0.25, L=6)", false, {}, {}, 0.0};
  const double r = 0.25;
  const Setup s(kAnnulus, 6);
  const auto pts = sample_points(kAnnulus, 202, 40, 0.0);
  double u_err = 0.0;
  for (const Complex& z : pts) u_err = std::max(u_err, std::abs(s.m.u(1, z) - std::log(std::abs(z)) / std::log(r)));
  below(c, "u_1 vs log|z|/log r", u_err, 1e-8);

  const PeriodMatrix pm = period_matrix(s.v, kAnnulus);
  const Complex tau_ref = std::log(r * r) / (2.0 * kPi * kI);
  below(c, "tau_11 vs log(r^2)/(2 pi i)", std::abs(pm.tau(0, 0) - tau_ref), 1e-7);

  const std::vector<Complex> zeros{0.5, -0.5};
  const ProperMap f = build_proper_map(s.ev, s.v, make_zero_config(s.m, zeros, {1, 1}));
  double map_err = 0.0;
  for (const Complex& z : pts) map_err = std::max(map_err, std::abs(f(z) - o.wang_yin(r, zeros, 1, z)));
  below(c, "Wang-Yin agreement (40 points)", map_err, 1e-7);
  equal(c, "windings (1,1)", winding_mismatches([&](Complex z) { return f(z); }, kAnnulus, {1, 1}));
  c.seconds = t.seconds();
  below(c, "runtime (s)", c.seconds, 30.0);
  return c;
}

Criterion cross_formula() {
  Timer t;
  Criterion c{3, "cross-formula consistency (3-connected)", false, {}, {}, 0.0};
  const Setup s(kTriply, 5);
  const Complex p{0.0, 0.3};
  const std::vector<Complex> q = complete_zeros(s.m, {p}, {1, 1, 1}, {{-0.5, 0.2}, {0.5, -0.2}});
  const ProperMap f = build_proper_map(s.ev, s.v, make_zero_config(s.m, {p, q[0], q[1]}, {1, 1, 1}));
  const ProperMap alt = build_proper_map_alt(s.ev, {{p}, {q[0]}, {q[1]}});
  const auto pts = sample_points(kTriply, 303, 30, 0.02);
  std::vector<Complex> ratios;
  for (const Complex& z : pts) ratios.push_back(alt(z) / f(z));
  Complex mean{0.0};
  for (const Complex& x : ratios) mean += x;
  mean /= static_cast<double>(ratios.size());
  double var = 0.0;
  for (const Complex& x : ratios) var += std::norm(x - mean);
  below(c, "slit-product vs exponential-product ratio stddev", std::sqrt(var / ratios.size()), 1e-6);
  below(c, "ratio modulus - 1", std::abs(std::abs(mean) - 1.0), 1e-6);

  double mob = 0.0;
  const auto pp = sample_points(kTriply, 304, 20, 0.02);
  for (std::size_t i = 0; i + 1 < pp.size(); i += 2) {
    const Complex z = pp[i];
    const Complex y = pp[i + 1];
    mob = std::max(mob, std::abs(eta_via_mobius_product(kTriply, s.ev.enumeration(), z, y) -
                                 eta(s.ev, z, y) / eta(s.ev, 1.0, y)));
  }
  below(c, "Moebius product vs omega ratio", mob, 1e-6);

  const PrimeEvaluator adaptive(kTriply);
  double rel = 0.0;
  double fe = 0.0;
  double har = 0.0;
  const PeriodMatrix pm = period_matrix(s.v, kTriply);
  double fe_near = 0.0;
  for (const Complex& z : sample_points(kTriply, 305, 10, 0.0)) {
    for (int j = 1; j <= 2; ++j) {
      rel = std::max(rel, eta_j_relation_residual(adaptive, s.v, j, z, p, {0.0, -0.4}));
      fe_near = std::max(fe_near, functional_equation_residual(s.ev, z, {-0.2, 0.5}, j, s.v));
    }
    har = std::max(har, har_relation_residual(s.m, s.v, pm, z));
  }
  const PrimeEvaluator shifted(kTriply, 6);
  for (const Complex& z : sample_points(kTriply, 305, 10, 0.0)) {
    for (int j = 1; j <= 2; ++j) fe = std::max(fe, functional_equation_residual(s.ev, shifted, z, {-0.2, 0.5}, j, s.v));
  }
  below(c, "eta / eta_j relation residual", rel, 1e-7);
  below(c, "functional equation residual (L=5 on Omega, L=6 at theta_j z)", fe, 1e-6);
  char buf[160];
  std::snprintf(buf, sizeof buf, "functional equation residual with L=5 on both sides: %.3e",
                fe_near);
  c.notes.push_back(buf);
  below(c, "harmonic relation residual", har, 1e-6);
  c.seconds = t.seconds();
  below(c, "runtime (s)", c.seconds, 120.0);
  return c;
}

Criterion boundary_behavior(std::uint64_t seed) {
  Timer t;
  Criterion c{4, "boundary behavior of random admissible maps", false, {}, {}, 0.0};
  std::mt19937_64 rng(seed);
  const std::vector<std::pair<CircularDomain, std::vector<BoundaryDegree>>> cases{
      {kAnnulus, {{1, 1}, {2, 1}, {1, 2}}}, {kTriply, {{1, 1, 1}, {2, 1, 1}, {1, 1, 2}}}};
  for (const auto& [d, nus] : cases) {
    const Setup s(d, d.genus() == 1 ? 6 : 5);
    double dev = 0.0;
    int bad = 0;
    for (int k = 0; k < 10; ++k) {
      const BoundaryDegree& nu = nus[static_cast<std::size_t>(k) % nus.size()];
      const ProperMap f = build_proper_map(s.ev, s.v, random_config(s.m, rng, nu));
      dev = std::max(dev, boundary_modulus_deviation(f, d, 256));
      bad += winding_mismatches([&](Complex z) { return f(z); }, d, nu);
    }
    const std::string tag = d.genus() == 1 ? "annulus" : "3-connected";
    below(c, tag + ": max ||f|-1| on 256 samples/circle", dev, 1e-5);
    equal(c, tag + ": winding mismatches", bad);
  }
  c.seconds = t.seconds();
  return c;
}

Criterion boundary_data() {
  Timer t;
  Criterion c{5, "maps from boundary data", false, {}, {}, 0.0};
  {
    const Setup s(kAnnulus, 6);
    const Complex p{0.0, 0.5};
    BoundaryDataResult r;
    const ProperMap f = from_boundary_data(s.m, s.ev, s.v, p, {{1.0}, {{0.0, 0.25}}}, {}, {}, &r);
    below(c, "annulus n=2: max |f(w)-1|", std::max(std::abs(f(1.0) - 1.0), std::abs(f({0.0, 0.25}) - 1.0)), 1e-4);
    below(c, "annulus n=2: |f(p)|", std::abs(f(p)), 1e-8);

    const Complex p2{0.1, 0.4};
    const Complex a = std::polar(1.0, 2.0);
    const Complex b = std::polar(1.0, 4.0);
    const ProperMap f1 = from_boundary_data(s.m, s.ev, s.v, p2, {{1.0, a, b}, {0.25}}, {{1.3, 0.8}, {}});
    const ProperMap f2 = from_boundary_data(s.m, s.ev, s.v, p2, {{1.0, b, a}, {0.25}}, {{0.8, 1.3}, {}});
    double diff = 0.0;
    for (const Complex& z : sample_points(kAnnulus, 505, 20, 0.02)) diff = std::max(diff, std::abs(f1(z) - f2(z)));
    below(c, "annulus nu=(3,1): permuted boundary points, map difference", diff, 1e-6);
  }
  {
    const Setup s(kTriply, 5);
    const Complex p{0.0, 0.3};
    const std::vector<Complex> w{std::polar(1.0, 0.4), Complex{-0.5, 0.1}, Complex{0.6, 0.0}};
    const ProperMap f = from_boundary_data(s.m, s.ev, s.v, p, {{w[0]}, {w[1]}, {w[2]}}, {});
    double err = 0.0;
    for (const Complex& x : w) err = std::max(err, std::abs(f(x) - 1.0));
    below(c, "3-connected nu=(1,1,1): max |f(w)-1|", err, 1e-4);
    below(c, "3-connected nu=(1,1,1): |f(p)|", std::abs(f(p)), 1e-8);
  }
  c.seconds = t.seconds();
  return c;
}

Criterion semigroup(const Oracles& o, std::uint64_t seed) {
  Timer t;
  Criterion c{6, "semigroup of proper maps", false, {}, {}, 0.0};
  const Setup s(kTriply, 5);
  std::mt19937_64 rng(seed);
  const ZeroConfig c1 = random_config(s.m, rng, {1, 1, 1});
  const ZeroConfig c2 = random_config(s.m, rng, {2, 1, 1});
  const ProperMap f = build_proper_map(s.ev, s.v, c1);
  const ProperMap g = build_proper_map(s.ev, s.v, c2);
  auto fg = [&](Complex z) { return f(z) * g(z); };

  std::vector<Complex> seeds;
  for (const Complex& z : c1.zeros) seeds.push_back(z + Complex{1e-3, -1e-3});
  for (const Complex& z : c2.zeros) seeds.push_back(z + Complex{-1e-3, 1e-3});
  const std::vector<Complex> found = locate_zeros(fg, seeds);
  std::vector<Complex> all = c1.zeros;
  all.insert(all.end(), c2.zeros.begin(), c2.zeros.end());
  double zerr = 0.0;
  for (std::size_t k = 0; k < all.size(); ++k) zerr = std::max(zerr, std::abs(found[k] - all[k]));
  below(c, "zeros of f*g vs union of zero sets", zerr, 1e-8);

  double berr = 0.0;
  for (const Complex& z : sample_points(kDisk, 606, 20, 0.0)) {
    berr = std::max(berr, std::abs(o.blaschke(found, z) - o.blaschke(c1.zeros, z) * o.blaschke(c2.zeros, z)));
  }
  below(c, "Blaschke(f*g) vs Blaschke(f)*Blaschke(g)", berr, 1e-8);

  BoundaryDegree sum(3);
  BoundaryDegree twice(3);
  for (std::size_t l = 0; l < 3; ++l) {
    sum[l] = c1.nu[l] + c2.nu[l];
    twice[l] = 2 * c1.nu[l];
  }
  below(c, "max ||f*g|-1| on 256 samples/circle", boundary_modulus_deviation(fg, kTriply, 256), 2e-5);
  equal(c, "degree additivity (winding mismatches)", winding_mismatches(fg, kTriply, sum));
  const std::vector<Complex> outer{0.3, {0.0, -0.4}};
  auto hf = [&](Complex z) { return o.blaschke(outer, f(z)); };
  equal(c, "composition degree multiplicativity (winding mismatches)", winding_mismatches(hf, kTriply, twice));
  c.seconds = t.seconds();
  return c;
}

WitnessRun reproduction(const WitnessOptions& opts, int control_resolution) {
  Timer t;
  WitnessRun run;
  Criterion& c = run.criterion;
  c = Criterion{7, "disconnected Caratheodory ball (soft)", true, {}, {}, 0.0};
  run.witness = find_disconnected_ball(opts);
  const Witness& w = run.witness;
  c.checks.push_back({"components at r1", static_cast<double>(w.components), 2.0, w.found && w.components >= 2});
  if (w.found) {
    c.checks.push_back({"r2 < r1", w.r2, w.r1, w.r2 < w.r1});
    c.checks.push_back({"closure gap (pixels) > diagonal", w.closure_gap, w.pixel_diagonal,
                        w.closure_gap > w.pixel_diagonal});
  }
  char buf[256];
  for (const BetaProxy& b : w.proxies) {
    std::snprintf(buf, sizeof buf, "beta proxies r=%.3g offset=%.0e zeta=(%.4f,%.4f): beta1 in [%.6f,%.6f], beta2 in [%.6f,%.6f]",
                  b.radius, b.offset, b.zeta.real(), b.zeta.imag(), b.beta1_min, b.beta1_max, b.beta2_min,
                  b.beta2_max);
    c.notes.push_back(buf);
  }
  for (const std::string& line : w.log) c.notes.push_back(line);

  // Negative control: annulus balls stay connected at every threshold.
  const Setup s(kAnnulus, 6);
  const DistanceSolver solver(s.m, s.ev, s.v);
  const Complex base{0.29, 0.0};
  BallRaster r = ball_raster(solver, base, 0.5, BoundingBox{}, control_resolution, control_resolution,
                             RasterOptions{opts.distance, 0});
  int worst = 0;
  for (double th : {0.3, 0.5, 0.7, 0.9, 0.95, 0.99}) {
    label_components(r, th);
    worst = std::max(worst, r.components);
  }
  c.checks.push_back({"annulus control: max components", static_cast<double>(worst), 1.0, worst == 1});
  c.seconds = t.seconds();
  c.checks.push_back({"runtime (s)", c.seconds, 1800.0, c.seconds < 1800.0});
  return run;
}

std::vector<Criterion> run_suite(const std::string& suite, const Oracles& o, std::uint64_t seed,
                                 const WitnessOptions& witness) {
  if (suite == "disk") return {disk_degeneration(o)};
  if (suite == "annulus") return {annulus_oracle(o)};
  if (suite == "triply") return {cross_formula(), boundary_behavior(seed), boundary_data(), semigroup(o, seed)};
  if (suite == "witness") return {reproduction(witness, 100).criterion};
  throw DomainError("unknown verification suite: " + suite);
}

std::string format_table(const std::vector<Criterion>& criteria) {
  std::string out;
  char buf[512];
  for (const Criterion& c : criteria) {
    std::snprintf(buf, sizeof buf, "[%d] %s  (%.2f s)%s\n", c.id, c.title.c_str(), c.seconds, c.soft ? "  soft" : "");
    out += buf;
    for (const Check& k : c.checks) {
      std::snprintf(buf, sizeof buf, "    %-64s %12.4e  tol %10.3e  %s\n", k.name.c_str(), k.measured, k.tolerance,
                    k.pass ? "pass" : "FAIL");
      out += buf;
    }
  }
  return out;
}

}  // namespace circmap::verify
