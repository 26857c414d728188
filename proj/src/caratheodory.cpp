#include "circmap/caratheodory.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

namespace circmap {

namespace {

constexpr double kFailPenalty = 1e3;

struct Objective {
  const DistanceSolver* solver;
  Complex base;
  Complex z;
  ChartPoint chart;
  double best = -std::numeric_limits<double>::infinity();
  ChartPoint best_chart;
  std::vector<Complex> best_points;
  int evaluations = 0;
};

// -sum_k log|eta(z, p_k)| over the chart; failures get a large penalty.
double objective(const gsl_vector* x, void* params) {
  auto* o = static_cast<Objective*>(params);
  ++o->evaluations;
  ChartPoint trial = o->chart;
  for (std::size_t k = 0; k < trial.angle.size(); ++k) trial.angle[k] = gsl_vector_get(x, k);
  try {
    const std::vector<Complex> P = o->solver->chart_points(o->base, trial);
    double s = 0.0;
    for (const Complex& p : P) s += std::log(std::abs(eta(o->solver->evaluator(), o->z, p)));
    if (!std::isfinite(s)) return kFailPenalty;
    o->chart.depth = trial.depth;
    if (s > o->best) {
      o->best = s;
      o->best_chart = trial;
      o->best_points = P;
    }
    return -s;
  } catch (const std::exception&) {
    return kFailPenalty;
  }
}

// One simplex search; returns whether it converged to tolerance.
bool simplex_search(Objective& o, double step, const DistanceOptions& opts) {
  const std::size_t n = o.chart.angle.size();
  gsl_multimin_function fn{&objective, n, &o};
  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* ss = gsl_vector_alloc(n);
  for (std::size_t k = 0; k < n; ++k) {
    gsl_vector_set(x, k, o.chart.angle[k]);
    gsl_vector_set(ss, k, step);
  }
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
  gsl_multimin_fminimizer_set(s, &fn, x, ss);
  const int budget = o.evaluations + opts.max_evaluations;
  bool converged = false;
  while (o.evaluations < budget) {
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), opts.tol) == GSL_SUCCESS) {
      converged = true;
      break;
    }
  }
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(ss);
  gsl_vector_free(x);
  return converged;
}

struct GslQuiet {
  gsl_error_handler_t* old;
  GslQuiet() : old(gsl_set_error_handler_off()) {}
  ~GslQuiet() { gsl_set_error_handler(old); }
};

}  // namespace

DistanceSolver::DistanceSolver(const HarmonicModel& m, const PrimeEvaluator& ev, const IntegralsFirstKind& v)
    : ev_(std::make_shared<const PrimeEvaluator>(ev)), v_(std::make_shared<const IntegralsFirstKind>(v)) {
  if (!(m.domain() == ev.domain()) || !(v.model().domain() == ev.domain())) {
    throw DomainError("harmonic model, integrals and prime function belong to different domains");
  }
}

std::vector<Complex> DistanceSolver::chart_points(Complex base, ChartPoint& chart) const {
  const CircularDomain& d = domain();
  const int g = d.genus();
  std::vector<Complex> anchors;
  std::vector<Complex> dirs;
  std::vector<double> s = chart.depth;
  for (int k = 0; k < g; ++k) {
    const int b = chart.boundary[static_cast<std::size_t>(k)];
    const Complex w = d.boundary_point(b, chart.angle[static_cast<std::size_t>(k)]);
    anchors.push_back(w);
    dirs.push_back(d.inward_normal(b, w));
    double& sk = s[static_cast<std::size_t>(k)];
    if (!(sk > 0.0)) sk = 0.02;
    while (!d.contains(w + sk * dirs.back()) && sk > 1e-9) sk *= 0.5;
  }
  NewtonOptions opts;
  opts.tol = 1e-12;
  opts.max_iter = 12;
  const BoundaryDegree nu(static_cast<std::size_t>(g + 1), 1);
  s = solve_on_lines(model(), {base}, nu, anchors, dirs, s, opts);
  chart.depth = s;
  std::vector<Complex> P;
  for (int k = 0; k < g; ++k) P.push_back(anchors[static_cast<std::size_t>(k)] + s[static_cast<std::size_t>(k)] * dirs[static_cast<std::size_t>(k)]);
  return P;
}

double DistanceSolver::modulus(Complex base, const std::vector<Complex>& P, Complex z) const {
  const Eigen::VectorXcd vv = v_->v_all(z);
  double log_mod = 2.0 * kPi * vv.imag().sum() + std::log(std::abs(eta(*ev_, z, base)));
  for (const Complex& p : P) log_mod += std::log(std::abs(eta(*ev_, z, p)));
  return std::exp(log_mod);
}

DistanceResult DistanceSolver::refine(Complex base, Complex z, const ChartPoint& start,
                                      const DistanceOptions& opts) const {
  const CircularDomain& d = domain();
  if (!d.contains(base) || !d.contains(z)) throw DomainError("distance points must lie inside the domain");
  DistanceResult res;
  if (d.genus() == 0) {
    res.value = std::abs(blaschke_factor(z, base));
    return res;
  }
  if (z == base) {
    res.chart = start;
    return res;
  }
  GslQuiet quiet;
  Objective o{this, base, z, start, -std::numeric_limits<double>::infinity(), {}, {}, 0};
  const bool converged = simplex_search(o, opts.initial_step, opts);
  if (o.best_points.empty()) throw NumericalError("no admissible zero set found from the start chart");
  res.value = modulus(base, o.best_points, z);
  res.argmax = o.best_points;
  res.chart = o.best_chart;
  res.stagnated = !converged;
  res.evaluations = o.evaluations;
  return res;
}

DistanceResult DistanceSolver::distance(Complex base, Complex z, const DistanceOptions& opts) const {
  const CircularDomain& d = domain();
  if (!d.contains(base) || !d.contains(z)) throw DomainError("distance points must lie inside the domain");
  const int g = d.genus();
  DistanceResult best;
  if (g == 0) {
    best.value = std::abs(blaschke_factor(z, base));
    return best;
  }
  if (z == base) return best;
  GslQuiet quiet;
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
  bool any = false;
  bool converged_any = false;
  int evaluations = 0;
  for (int seed = 0; seed < opts.seeds; ++seed) {
    // Boundary assignments cycle through "all circles but one".
    ChartPoint chart;
    const int skip = seed % (g + 1);
    for (int b = 0; b <= g; ++b) {
      if (b == skip) continue;
      chart.boundary.push_back(b);
      chart.angle.push_back(ang(rng));
      chart.depth.push_back(b == 0 ? 0.05 : 0.5 * d.boundary(b).radius);
    }
    Objective o{this, base, z, chart, -std::numeric_limits<double>::infinity(), {}, {}, 0};
    const bool converged = simplex_search(o, opts.initial_step, opts);
    evaluations += o.evaluations;
    if (o.best_points.empty()) continue;
    const double value = modulus(base, o.best_points, z);
    if (!any || value > best.value) {
      best.value = value;
      best.argmax = o.best_points;
      best.chart = o.best_chart;
    }
    any = true;
    converged_any = converged_any || converged;
  }
  if (!any) throw NumericalError("no admissible zero set found from any start");
  best.stagnated = !converged_any;
  best.evaluations = evaluations;
  return best;
}

DistanceResult mobius_distance(const HarmonicModel& m, const PrimeEvaluator& ev, const IntegralsFirstKind& v,
                               Complex base, Complex z, const DistanceOptions& opts) {
  return DistanceSolver(m, ev, v).distance(base, z, opts);
}

double caratheodory_from_mobius(double c_star) {
  if (c_star < 0.0 || c_star >= 1.0) throw DomainError("Moebius distance must lie in [0, 1)");
  return std::atanh(c_star);
}

double caratheodory_distance(const HarmonicModel& m, const PrimeEvaluator& ev, const IntegralsFirstKind& v,
                             Complex base, Complex z, const DistanceOptions& opts) {
  return caratheodory_from_mobius(mobius_distance(m, ev, v, base, z, opts).value);
}

double product_distance(double c1, Complex lambda) {
  if (c1 < 0.0) throw DomainError("distance must be nonnegative");
  if (std::abs(lambda) >= 1.0) throw DomainError("lambda must lie in the unit disk");
  return std::max(c1, std::atanh(std::abs(lambda)));
}

Complex BallRaster::pixel_center(int i, int j) const {
  const double dx = (bbox.x1 - bbox.x0) / nx;
  const double dy = (bbox.y1 - bbox.y0) / ny;
  return {bbox.x0 + (i + 0.5) * dx, bbox.y0 + (j + 0.5) * dy};
}

std::array<int, 2> BallRaster::pixel_of(Complex z) const {
  const int i = static_cast<int>(std::floor((z.real() - bbox.x0) / (bbox.x1 - bbox.x0) * nx));
  const int j = static_cast<int>(std::floor((z.imag() - bbox.y0) / (bbox.y1 - bbox.y0) * ny));
  if (i < 0 || i >= nx || j < 0 || j >= ny) return {-1, -1};
  return {i, j};
}

void label_components(BallRaster& raster, double threshold) {
  raster.threshold = threshold;
  const int nx = raster.nx;
  const int ny = raster.ny;
  raster.labels.assign(raster.values.size(), -1);
  int next = 0;
  std::deque<int> queue;
  for (int start = 0; start < nx * ny; ++start) {
    const double v0 = raster.values[static_cast<std::size_t>(start)];
    if (!(v0 < threshold) || raster.labels[static_cast<std::size_t>(start)] >= 0) continue;
    raster.labels[static_cast<std::size_t>(start)] = next;
    queue.push_back(start);
    while (!queue.empty()) {
      const int c = queue.front();
      queue.pop_front();
      const int i = c % nx;
      const int j = c / nx;
      const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
      for (const auto& q : nb) {
        if (q[0] < 0 || q[0] >= nx || q[1] < 0 || q[1] >= ny) continue;
        const int idx = q[1] * nx + q[0];
        if (raster.labels[static_cast<std::size_t>(idx)] >= 0) continue;
        if (!(raster.values[static_cast<std::size_t>(idx)] < threshold)) continue;
        raster.labels[static_cast<std::size_t>(idx)] = next;
        queue.push_back(idx);
      }
    }
    ++next;
  }
  raster.components = next;
}

bool component_contains_disk(const BallRaster& raster, int label, double radius) {
  const int R = static_cast<int>(std::ceil(radius));
  for (int j = 0; j < raster.ny; ++j) {
    for (int i = 0; i < raster.nx; ++i) {
      if (raster.label_at(i, j) != label) continue;
      bool ok = true;
      for (int dj = -R; dj <= R && ok; ++dj) {
        for (int di = -R; di <= R && ok; ++di) {
          if (di * di + dj * dj > radius * radius) continue;
          const int a = i + di;
          const int b = j + dj;
          if (a < 0 || a >= raster.nx || b < 0 || b >= raster.ny || raster.label_at(a, b) != label) ok = false;
        }
      }
      if (ok) return true;
    }
  }
  return false;
}

std::string raster_to_csv(const BallRaster& r) {
  std::string out;
  char buf[64];
  auto num = [&](double x) -> std::string {
    if (std::isnan(x)) return "NaN";
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  };
  out += "# bbox " + num(r.bbox.x0) + " " + num(r.bbox.y0) + " " + num(r.bbox.x1) + " " + num(r.bbox.y1) + "\n";
  out += "# resolution " + std::to_string(r.nx) + " " + std::to_string(r.ny) + "\n";
  out += "# center " + num(r.center.real()) + " " + num(r.center.imag()) + "\n";
  out += "# threshold " + num(r.threshold) + "\n";
  for (int j = 0; j < r.ny; ++j) {
    for (int i = 0; i < r.nx; ++i) {
      if (i > 0) out += ",";
      out += num(r.at(i, j));
    }
    out += "\n";
  }
  return out;
}

BallRaster ball_raster(const DistanceSolver& solver, Complex center, double threshold, const BoundingBox& bbox, int nx,
                       int ny, const RasterOptions& opts) {
  const CircularDomain& d = solver.domain();
  if (nx < 1 || ny < 1) throw DomainError("raster resolution must be positive");
  if (!(bbox.x1 > bbox.x0) || !(bbox.y1 > bbox.y0)) throw DomainError("empty raster bounding box");
  if (!d.contains(center)) throw DomainError("ball center must lie inside the domain");
  BallRaster r;
  r.bbox = bbox;
  r.nx = nx;
  r.ny = ny;
  r.center = center;
  const auto cp = r.pixel_of(center);
  if (cp[0] >= 0 && !d.contains(r.pixel_center(cp[0], cp[1]))) {
    throw DomainError("raster too coarse: the pixel containing the center lies outside the domain");
  }
  r.values.assign(static_cast<std::size_t>(nx) * ny, std::numeric_limits<double>::quiet_NaN());
  // Up to two local maxima per pixel, best first, carried to the right and downwards.
  std::vector<std::vector<DistanceResult>> branches(r.values.size());
  DistanceOptions local = opts.distance;
  local.initial_step = std::min(local.initial_step, 0.02);
  local.tol = std::max(local.tol, 1e-4);
  const int every = opts.reseed_every > 0 ? opts.reseed_every : std::max(1, std::max(nx, ny) / 20);

  auto same_branch = [](const DistanceResult& a, const DistanceResult& b) {
    if (a.argmax.size() != b.argmax.size()) return false;
    for (std::size_t k = 0; k < a.argmax.size(); ++k) {
      double nearest = std::numeric_limits<double>::infinity();
      for (const Complex& q : b.argmax) nearest = std::min(nearest, std::abs(a.argmax[k] - q));
      if (nearest > 1e-3) return false;
    }
    return true;
  };

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t idx = static_cast<std::size_t>(j) * nx + i;
      const Complex z = r.pixel_center(i, j);
      if (!d.contains(z)) continue;
      std::vector<DistanceResult> found;
      if (d.genus() == 0 || (i % every == 0 && j % every == 0)) found.push_back(solver.distance(center, z, opts.distance));
      std::vector<const DistanceResult*> starts;
      if (i > 0) {
        for (const auto& b : branches[idx - 1]) starts.push_back(&b);
      }
      if (j > 0) {
        for (const auto& b : branches[idx - static_cast<std::size_t>(nx)]) starts.push_back(&b);
      }
      for (const DistanceResult* start : starts) {
        if (start->chart.angle.empty()) continue;
        try {
          found.push_back(solver.refine(center, z, start->chart, local));
        } catch (const NumericalError&) {
        }
      }
      if (found.empty()) found.push_back(solver.distance(center, z, opts.distance));
      std::stable_sort(found.begin(), found.end(),
                       [](const DistanceResult& a, const DistanceResult& b) { return a.value > b.value; });
      std::vector<DistanceResult>& keep = branches[idx];
      for (auto& f : found) {
        if (keep.size() == 2) break;
        if (std::none_of(keep.begin(), keep.end(), [&](const DistanceResult& k) { return same_branch(k, f); })) {
          keep.push_back(std::move(f));
        }
      }
      r.values[idx] = keep.front().value;
    }
    // Rows above the previous one are no longer needed.
    if (j >= 1) {
      for (int i = 0; i < nx; ++i) branches[static_cast<std::size_t>(j - 1) * nx + i].clear();
    }
  }
  label_components(r, threshold);
  return r;
}

Complex wang_yin_eval(double r, const std::vector<Complex>& zeros, int d, Complex z, int terms) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("annulus radius must lie in (0, 1)");
  Complex prod{1.0};
  for (const Complex& p : zeros) {
    if (!(std::abs(p) > r && std::abs(p) < 1.0)) throw DomainError("zeros must lie in the annulus");
    prod *= p;
  }
  if (std::abs(std::abs(prod) - std::pow(r, d)) > 1e-8) throw DomainError("zeros violate |p_1 ... p_n| = r^d");
  auto raw = [&](Complex x) {
    Complex f = std::pow(x, -d);
    for (const Complex& p : zeros) {
      f *= blaschke_factor(x, p);
      for (int j = 1; j <= terms; ++j) {
        const double a = std::pow(r, 2 * j);
        f *= blaschke_factor(x, p * a) * blaschke_factor(x, p / a) * (std::conj(p) / p);
      }
    }
    return f;
  };
  return raw(z) / raw(Complex{1.0});
}

}  // namespace circmap

namespace circmap {

namespace {

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

BetaProxy beta_proxy(const PrimeEvaluator& ev, const WitnessOptions& opts, double radius, double offset, Complex zeta,
                     int angles) {
  const Complex dir = (opts.shrinking_center - opts.base_center) / std::abs(opts.shrinking_center - opts.base_center);
  const Complex w = opts.base_center + opts.base_radius * dir;
  BetaProxy b;
  b.radius = radius;
  b.offset = offset;
  b.zeta = zeta;
  b.beta1_min = b.beta2_min = std::numeric_limits<double>::infinity();
  for (int a = 0; a < angles; ++a) {
    const double t = 2.0 * kPi * a / angles;
    const Complex q = opts.shrinking_center + std::polar(radius + offset, t);
    const double b1 = std::abs(eta(ev, zeta, q) / eta(ev, w, q));
    const Complex q2 = std::polar(1.0 - offset, t);
    const double b2 = std::abs(eta_l(ev, 2, zeta, q2) / eta_l(ev, 2, w, q2));
    b.beta1_min = std::min(b.beta1_min, b1);
    b.beta1_max = std::max(b.beta1_max, b1);
    b.beta2_min = std::min(b.beta2_min, b2);
    b.beta2_max = std::max(b.beta2_max, b2);
  }
  return b;
}

// Certifies a raster whose labels are taken at r1; fills the witness on success.
bool certify(const DistanceSolver& solver, BallRaster& raster, double r1, Witness& out) {
  label_components(raster, r1);
  const auto pb = raster.pixel_of(out.base);
  const auto pz = raster.pixel_of(out.zeta);
  out.components = raster.components;
  if (pb[0] < 0 || pz[0] < 0) return false;
  const int lb = raster.label_at(pb[0], pb[1]);
  const int lz = raster.label_at(pz[0], pz[1]);
  if (lb < 0 || lz < 0 || lb == lz) return false;
  if (!component_contains_disk(raster, lb, 3.0) || !component_contains_disk(raster, lz, 3.0)) return false;

  int count = 0;
  int xi_i = -1;
  int xi_j = -1;
  for (int j = 0; j < raster.ny; ++j) {
    for (int i = 0; i < raster.nx; ++i) {
      if (raster.label_at(i, j) != lz) continue;
      ++count;
      if (xi_i < 0 || raster.at(i, j) < raster.at(xi_i, xi_j)) {
        xi_i = i;
        xi_j = j;
      }
    }
  }
  out.far_component_pixels = count;
  out.xi = raster.pixel_center(xi_i, xi_j);
  out.r2 = raster.at(xi_i, xi_j);
  double gap = std::numeric_limits<double>::infinity();
  for (int j = 0; j < raster.ny; ++j) {
    for (int i = 0; i < raster.nx; ++i) {
      if (!(raster.at(i, j) < out.r2)) continue;
      gap = std::min(gap, std::hypot(i - xi_i, j - xi_j));
    }
  }
  out.closure_gap = gap;
  out.pixel_diagonal = std::sqrt(2.0);
  (void)solver;
  return out.r2 < r1 && gap > out.pixel_diagonal;
}

}  // namespace

Witness find_disconnected_ball(const WitnessOptions& opts) {
  if (opts.radii.empty() || opts.base_offsets.empty()) throw DomainError("witness search needs radii and base offsets");
  const Complex dir = (opts.shrinking_center - opts.base_center) / std::abs(opts.shrinking_center - opts.base_center);
  Witness out;
  Screening best;
  best.barrier = -std::numeric_limits<double>::infinity();
  double best_score = -std::numeric_limits<double>::infinity();

  for (double radius : opts.radii) {
    const CircularDomain d({Circle{opts.base_center, opts.base_radius}, Circle{opts.shrinking_center, radius}});
    require_valid(d);
    const HarmonicModel m = solve_harmonic_measures(d);
    const IntegralsFirstKind v(m);
    const PrimeEvaluator ev(d, opts.word_length);
    const DistanceSolver solver(m, ev, v);

    // zeta candidates at 1.5, 2 and 3 radii from the shrinking circle's center.
    BetaProxy pick;
    double pick_score = std::numeric_limits<double>::infinity();
    for (double k : {1.5, 2.0, 3.0}) {
      for (double phi : {0.0, kPi / 2.0, kPi}) {
        const BetaProxy b =
            beta_proxy(ev, opts, radius, opts.proxy_offset, opts.shrinking_center + std::polar(k * radius, phi), 32);
        out.proxies.push_back(b);
        out.log.push_back(fmt("r=%.3g zeta=(%.4f,%.4f) beta1*beta2 >= %.6f", radius, b.zeta.real(), b.zeta.imag(),
                              b.beta1_min * b.beta2_min));
        if (b.beta1_min * b.beta2_min < pick_score) {
          pick_score = b.beta1_min * b.beta2_min;
          pick = b;
        }
      }
    }

    // The same ratios much closer to the circles.
    const BetaProxy tight = beta_proxy(ev, opts, radius, 1e-6, pick.zeta, 32);
    out.proxies.push_back(tight);
    out.log.push_back(fmt("r=%.3g zeta=(%.4f,%.4f) at offset 1e-6: beta1*beta2 in [%.8f, %.8f]", radius,
                          tight.zeta.real(), tight.zeta.imag(), tight.beta1_min * tight.beta2_min,
                          tight.beta1_max * tight.beta2_max));

    const double reach = std::abs(opts.shrinking_center - opts.base_center) - opts.base_radius;
    const double zr = std::abs(pick.zeta - opts.shrinking_center);
    for (double offset : opts.base_offsets) {
      Screening s;
      s.radius = radius;
      s.base = opts.base_center + (opts.base_radius + offset) * dir;
      s.zeta = pick.zeta;
      s.zeta_value = solver.distance(s.base, s.zeta, opts.distance).value;
      for (double f : {1.5, 2.0, 3.0}) {
        const double R = std::min(f * zr, 0.9 * reach);
        double ring = std::numeric_limits<double>::infinity();
        for (int a = 0; a < 16; ++a) {
          const Complex z = opts.shrinking_center + std::polar(R, 2.0 * kPi * a / 16);
          if (!d.contains(z)) continue;
          ring = std::min(ring, solver.distance(s.base, z, opts.distance).value);
        }
        if (std::isfinite(ring)) s.barrier = std::max(s.barrier, ring);
      }
      out.screenings.push_back(s);
      out.log.push_back(fmt("r=%.3g base offset %.3g: c*(base,zeta)=%.9f ring barrier=%.9f", radius, offset,
                            s.zeta_value, s.barrier));
      const double score = s.barrier - s.zeta_value;
      if (score > best_score) {
        best_score = score;
        best = s;
      }
      if (score <= 0.0) continue;

      const double r1 = 0.5 * (s.zeta_value + s.barrier);
      BallRaster raster = ball_raster(solver, s.base, r1, opts.bbox, opts.resolution, opts.resolution,
                                      RasterOptions{opts.distance, 0});
      Witness w = out;
      w.domain = d;
      w.radius = radius;
      w.base = s.base;
      w.zeta = s.zeta;
      w.zeta_value = s.zeta_value;
      w.r1 = r1;
      if (certify(solver, raster, r1, w)) {
        w.r2 = solver.distance(w.base, w.xi, opts.distance).value;
        w.found = true;
        w.raster = std::move(raster);
        w.log.push_back(fmt("witness: r1=%.9f r2=%.9f, %d components", w.r1, w.r2, w.components));
        return w;
      }
      out.log.push_back(fmt("raster at r1=%.9f did not certify (%d components)", r1, w.components));
    }
  }

  out.found = false;
  if (opts.diagnostic_raster && !out.screenings.empty()) {
    const CircularDomain d({Circle{opts.base_center, opts.base_radius}, Circle{opts.shrinking_center, best.radius}});
    const HarmonicModel m = solve_harmonic_measures(d);
    const IntegralsFirstKind v(m);
    const PrimeEvaluator ev(d, opts.word_length);
    const DistanceSolver solver(m, ev, v);
    const double r1 = best.barrier > best.zeta_value ? 0.5 * (best.zeta_value + best.barrier)
                                                      : best.zeta_value + 1e-6;
    out.domain = d;
    out.radius = best.radius;
    out.base = best.base;
    out.zeta = best.zeta;
    out.zeta_value = best.zeta_value;
    out.r1 = r1;
    out.raster = ball_raster(solver, best.base, r1, opts.bbox, opts.resolution, opts.resolution,
                             RasterOptions{opts.distance, 0});
    out.components = out.raster.components;
    out.log.push_back(fmt("diagnostic raster at r=%.3g, r1=%.9f: %d components", best.radius, r1, out.components));
  }
  return out;
}

std::string witness_to_json(const Witness& w) {
  auto cx = [](Complex z) { return nlohmann::json::array({z.real(), z.imag()}); };
  nlohmann::json j;
  j["found"] = w.found;
  j["domain"] = nlohmann::json::parse(domain_to_json_text(w.domain));
  j["radius"] = w.radius;
  j["base"] = cx(w.base);
  j["zeta"] = cx(w.zeta);
  j["zeta_value"] = w.zeta_value;
  j["r1"] = w.r1;
  j["components"] = w.components;
  if (w.found) {
    j["r2"] = w.r2;
    j["xi"] = cx(w.xi);
    j["far_component_pixels"] = w.far_component_pixels;
    j["closure_gap_pixels"] = w.closure_gap;
    j["pixel_diagonal"] = w.pixel_diagonal;
  }
  nlohmann::json proxies = nlohmann::json::array();
  for (const BetaProxy& b : w.proxies) {
    proxies.push_back({{"radius", b.radius},
                       {"offset", b.offset},
                       {"zeta", cx(b.zeta)},
                       {"beta1", {b.beta1_min, b.beta1_max}},
                       {"beta2", {b.beta2_min, b.beta2_max}}});
  }
  j["beta_proxies"] = proxies;
  nlohmann::json screens = nlohmann::json::array();
  for (const Screening& s : w.screenings) {
    screens.push_back({{"radius", s.radius},
                       {"base", cx(s.base)},
                       {"zeta", cx(s.zeta)},
                       {"zeta_value", s.zeta_value},
                       {"barrier", s.barrier}});
  }
  j["screenings"] = screens;
  j["log"] = w.log;
  return j.dump(2);
}

}  // namespace circmap
