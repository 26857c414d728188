#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "circmap/proper_maps.hpp"

namespace circmap {

/// Chart of Z_{Omega, base}: free point k sits on the inward normal of boundary
/// `boundary[k]` at angle `angle[k]` (about that circle's center), `depth[k]` inside.
struct ChartPoint {
  std::vector<int> boundary;
  std::vector<double> angle;
  std::vector<double> depth;
};

struct DistanceOptions {
  int seeds = 8;
  std::uint64_t seed = 1;
  /// Simplex size (radians) at which a start stops.
  double tol = 1e-6;
  int max_evaluations = 300;
  double initial_step = 0.4;
};

struct DistanceResult {
  double value = 0.0;
  std::vector<Complex> argmax;
  ChartPoint chart;
  /// Set when no start converged to the simplex tolerance.
  bool stagnated = false;
  int evaluations = 0;
};

/// Moebius distance c*(base, z) = max |f(z)| over degree g+1 proper maps with f(base) = 0.
class DistanceSolver {
 public:
  DistanceSolver(const HarmonicModel& m, const PrimeEvaluator& ev, const IntegralsFirstKind& v);

  const CircularDomain& domain() const { return ev_->domain(); }
  const HarmonicModel& model() const { return v_->model(); }
  const PrimeEvaluator& evaluator() const { return *ev_; }

  /// Multi-start search.
  DistanceResult distance(Complex base, Complex z, const DistanceOptions& opts = {}) const;
  /// Single local search from a chart point (warm start).
  DistanceResult refine(Complex base, Complex z, const ChartPoint& start, const DistanceOptions& opts = {}) const;

  /// |Phi(z; base, P)| for a given admissible P.
  double modulus(Complex base, const std::vector<Complex>& P, Complex z) const;

  /// Points of the chart, with depths re-solved from `chart.depth`; throws on failure.
  std::vector<Complex> chart_points(Complex base, ChartPoint& chart) const;

 private:
  std::shared_ptr<const PrimeEvaluator> ev_;
  std::shared_ptr<const IntegralsFirstKind> v_;
};

DistanceResult mobius_distance(const HarmonicModel& m, const PrimeEvaluator& ev, const IntegralsFirstKind& v,
                               Complex base, Complex z, const DistanceOptions& opts = {});

/// atanh of the Moebius distance.
double caratheodory_distance(const HarmonicModel& m, const PrimeEvaluator& ev, const IntegralsFirstKind& v,
                             Complex base, Complex z, const DistanceOptions& opts = {});
double caratheodory_from_mobius(double c_star);

/// Distance on G x D between (a, 0) and (z, lambda) given c_G(a, z).
double product_distance(double c1, Complex lambda);

struct BoundingBox {
  double x0 = -1.0, y0 = -1.0, x1 = 1.0, y1 = 1.0;
};

struct BallRaster {
  BoundingBox bbox;
  int nx = 0;
  int ny = 0;
  Complex center;
  double threshold = 0.0;
  /// Row-major, row j at y = y0 + (j + 1/2) dy; NaN outside Omega.
  std::vector<double> values;
  /// Component id of each pixel of {value < threshold}, -1 elsewhere.
  std::vector<int> labels;
  int components = 0;

  Complex pixel_center(int i, int j) const;
  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * nx + i]; }
  int label_at(int i, int j) const { return labels[static_cast<std::size_t>(j) * nx + i]; }
  /// Pixel containing z, or {-1, -1}.
  std::array<int, 2> pixel_of(Complex z) const;
};

/// 4-neighbour components of {value < threshold}; updates labels and components.
void label_components(BallRaster& raster, double threshold);

/// Whether component `label` contains every pixel within `radius` pixels of one of its pixels.
bool component_contains_disk(const BallRaster& raster, int label, double radius);

std::string raster_to_csv(const BallRaster& raster);

struct RasterOptions {
  DistanceOptions distance;
  /// Full multi-start on every pixel whose row and column are multiples of this
  /// (0: about 20 per side).
  int reseed_every = 0;
};

/// c*(center, .) on an nx x ny grid, swept row by row with warm starts.
BallRaster ball_raster(const DistanceSolver& solver, Complex center, double threshold, const BoundingBox& bbox, int nx,
                       int ny, const RasterOptions& opts = {});

struct WitnessOptions {
  Complex base_center{-0.5, 0.0};
  double base_radius = 0.15;
  Complex shrinking_center{0.4, 0.0};
  std::vector<double> radii{0.1, 0.05, 0.02};
  int resolution = 300;
  BoundingBox bbox;
  int word_length = 5;
  DistanceOptions distance;
  /// Distance of the boundary proxies q from their circle.
  double proxy_offset = 1e-3;
  /// Distances of the base point from the base circle, tried in order.
  std::vector<double> base_offsets{0.04, 0.02, 0.01};
  /// Rasterize the best screened candidate even when no barrier was found.
  bool diagnostic_raster = true;
};

struct BetaProxy {
  double radius = 0.0;
  /// Distance of q from its circle.
  double offset = 0.0;
  Complex zeta;
  /// |eta(zeta, q) / eta(w, q)| with q near the shrinking circle, w on the base circle: min and max over angles.
  double beta1_min = 0.0;
  double beta1_max = 0.0;
  /// |eta_2(zeta, q) / eta_2(w, q)| with q near the unit circle: min and max over angles.
  double beta2_min = 0.0;
  double beta2_max = 0.0;
};

/// Barrier screening of one (base, zeta) pair: the ring minima of c*(base, .) around the shrinking circle.
struct Screening {
  double radius = 0.0;
  Complex base;
  Complex zeta;
  double zeta_value = 0.0;
  double barrier = 0.0;
};

struct Witness {
  bool found = false;
  CircularDomain domain;
  double radius = 0.0;
  Complex base;
  Complex zeta;
  double r1 = 0.0;
  double r2 = 0.0;
  Complex xi;
  /// c*(base, zeta), the number of components at r1 and the pixel count of the far component.
  double zeta_value = 0.0;
  int components = 0;
  int far_component_pixels = 0;
  /// Minimal distance (in pixels) from xi to the closure of the open r2-ball, and the pixel diagonal.
  double closure_gap = 0.0;
  double pixel_diagonal = 0.0;
  std::vector<BetaProxy> proxies;
  std::vector<Screening> screenings;
  std::vector<std::string> log;
  BallRaster raster;
};

Witness find_disconnected_ball(const WitnessOptions& opts = {});

std::string witness_to_json(const Witness& w);

/// Annulus r < |z| < 1: Wang-Yin product (j <= terms), rotated so the value at 1 is 1.
Complex wang_yin_eval(double r, const std::vector<Complex>& zeros, int d, Complex z, int terms = 10);

}  // namespace circmap
