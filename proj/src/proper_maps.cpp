#include "circmap/proper_maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace circmap {

namespace {

const Complex kTwoPiI = 2.0 * kPi * kI;

struct Shared {
  std::shared_ptr<const PrimeEvaluator> ev;
  std::shared_ptr<const IntegralsFirstKind> v;
};

Shared share(const PrimeEvaluator& ev, const IntegralsFirstKind& v) {
  return {std::make_shared<const PrimeEvaluator>(ev), std::make_shared<const IntegralsFirstKind>(v)};
}

double max_abs(const Eigen::VectorXd& x) { return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff(); }

void check_nu(const CircularDomain& d, const BoundaryDegree& nu) {
  if (static_cast<int>(nu.size()) != d.boundary_count()) {
    throw DomainError("boundary degree needs " + std::to_string(d.boundary_count()) + " entries");
  }
  for (int n : nu) {
    if (n < 0) throw DomainError("boundary degree entries must be nonnegative");
  }
}

void check_inside(const CircularDomain& d, const std::vector<Complex>& pts, const char* what) {
  for (const Complex& z : pts) {
    if (!d.contains(z)) {
      std::ostringstream os;
      os << what << " (" << z.real() << ", " << z.imag() << ") is not inside the domain";
      throw DomainError(os.str());
    }
  }
}

Complex exp_factor(const IntegralsFirstKind& v, const BoundaryDegree& nu, Complex z) {
  if (v.genus() == 0) return Complex{1.0};
  const Eigen::VectorXcd vv = v.v_all(z);
  Complex s{0.0};
  for (int j = 1; j <= v.genus(); ++j) s += static_cast<double>(nu[static_cast<std::size_t>(j)]) * vv(j - 1);
  return std::exp(-kTwoPiI * s);
}

Complex exp_factor_logd(const IntegralsFirstKind& v, const BoundaryDegree& nu, Complex z) {
  if (v.genus() == 0) return Complex{0.0};
  const Eigen::VectorXcd dv = v.dv_all(z);
  Complex s{0.0};
  for (int j = 1; j <= v.genus(); ++j) s += static_cast<double>(nu[static_cast<std::size_t>(j)]) * dv(j - 1);
  return -kTwoPiI * s;
}

ProperMap::Fn product_base(const Shared& s, const std::vector<Complex>& zeros, const BoundaryDegree& nu) {
  return [s, zeros, nu](Complex z) {
    Complex val = exp_factor(*s.v, nu, z);
    for (const Complex& p : zeros) val *= eta(*s.ev, z, p);
    return val;
  };
}

ProperMap::Fn product_logd(const Shared& s, const std::vector<Complex>& zeros, const BoundaryDegree& nu) {
  return [s, zeros, nu](Complex z) {
    Complex val = exp_factor_logd(*s.v, nu, z);
    for (const Complex& p : zeros) val += eta_log_derivative(*s.ev, z, p);
    return val;
  };
}

MobiusMap rotation_map(Complex c) { return MobiusMap{c, Complex{0.0}, Complex{0.0}, Complex{1.0}}; }

ProperMap product_map(const Shared& s, const ZeroConfig& config) {
  ProperMap f(config, product_base(s, config.zeros, config.nu), product_logd(s, config.zeros, config.nu),
              MobiusMap::identity(), "product");
  return f.with_outer(rotation_map(1.0 / f.base(Complex{1.0})));
}

void require_admissible(const ZeroConfig& c, double tol) {
  if (c.max_residual() >= tol) {
    std::ostringstream os;
    os << "zero set is not admissible for the boundary degree (residual " << c.max_residual() << ")";
    throw DomainError(os.str());
  }
}

void require_boundary_modulus(const ProperMap& f, const CircularDomain& d) {
  const double dev = boundary_modulus_deviation(f, d, 64);
  if (dev > 1e-4) {
    std::ostringstream os;
    os << "boundary modulus deviation " << dev << " exceeds 1e-4; increase the word length";
    throw NumericalError(os.str());
  }
}

void require_single_valued(const IntegralsFirstKind& v, const BoundaryDegree& nu) {
  for (const Complex& t : exponential_factor_turns(v, nu, 128)) {
    if (std::abs(t - std::round(t.real())) > 1e-8) {
      std::ostringstream os;
      os << "exponential factor is not single valued (increment " << t.real() << " + " << t.imag() << "i)";
      throw NumericalError(os.str());
    }
  }
}

ProperMap build_product(const Shared& s, const ZeroConfig& config, double tol) {
  const CircularDomain& d = s.ev->domain();
  check_nu(d, config.nu);
  if (config.degree() != static_cast<int>(config.zeros.size())) {
    throw DomainError("number of zeros differs from the total boundary degree");
  }
  check_inside(d, config.zeros, "zero");
  const ZeroConfig c = make_zero_config(s.v->model(), config.zeros, config.nu);
  require_admissible(c, tol);
  require_single_valued(*s.v, c.nu);
  ProperMap f = product_map(s, c);
  require_boundary_modulus(f, d);
  return f;
}

Complex m_ext(const ExtendedComplex& z, Complex p) {
  if (!z.is_finite()) return -1.0 / std::conj(p);
  return blaschke_factor(z.value, p);
}

// One-sided second-order estimate of |f'(w)| along the inward normal n.
double normal_speed(const ProperMap& f, Complex w, Complex n, double h) {
  const Complex d = (-3.0 * f(w) + 4.0 * f(w + h * n) - f(w + 2.0 * h * n)) / (2.0 * h);
  return std::abs(d);
}

}  // namespace

int ZeroConfig::degree() const { return std::accumulate(nu.begin(), nu.end(), 0); }

double ZeroConfig::max_residual() const {
  double r = 0.0;
  for (double x : residual) r = std::max(r, x);
  return r;
}

ZeroConfig zero_config_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError(std::string("zero config JSON parse error: ") + e.what());
  }
  if (!j.is_object() || !j.contains("zeros") || !j["zeros"].is_array() || !j.contains("nu") || !j["nu"].is_array()) {
    throw DomainError("zero config JSON needs \"zeros\" and \"nu\" arrays");
  }
  ZeroConfig c;
  for (const auto& z : j["zeros"]) {
    if (!z.is_array() || z.size() != 2) throw DomainError("each zero must be [re, im]");
    c.zeros.emplace_back(z[0].get<double>(), z[1].get<double>());
  }
  for (const auto& n : j["nu"]) {
    if (!n.is_number_integer()) throw DomainError("nu entries must be integers");
    c.nu.push_back(n.get<int>());
  }
  return c;
}

std::string zero_config_to_json_text(const ZeroConfig& c) {
  nlohmann::json j;
  j["zeros"] = nlohmann::json::array();
  for (const Complex& z : c.zeros) j["zeros"].push_back({z.real(), z.imag()});
  j["nu"] = c.nu;
  return j.dump();
}

Eigen::VectorXd harmonic_measure_vector(const HarmonicModel& m, Complex z) {
  const CircularDomain& d = m.domain();
  const int g = d.genus();
  for (int l = 0; l <= g; ++l) {
    const Circle c = d.boundary(l);
    if (std::abs(std::abs(z - c.center) - c.radius) <= 1e-12 * std::max(1.0, c.radius)) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(g);
      if (l > 0) e(l - 1) = 1.0;
      return e;
    }
  }
  return m.u_all(z);
}

std::vector<double> condition1_residual(const HarmonicModel& m, const std::vector<Complex>& zeros,
                                        const BoundaryDegree& nu) {
  check_nu(m.domain(), nu);
  const int g = m.genus();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(g);
  for (const Complex& z : zeros) sum += harmonic_measure_vector(m, z);
  std::vector<double> r(static_cast<std::size_t>(g));
  for (int j = 1; j <= g; ++j) r[static_cast<std::size_t>(j - 1)] = std::abs(sum(j - 1) - nu[static_cast<std::size_t>(j)]);
  return r;
}

ZeroConfig make_zero_config(const HarmonicModel& m, std::vector<Complex> zeros, BoundaryDegree nu) {
  ZeroConfig c;
  c.residual = condition1_residual(m, zeros, nu);
  c.zeros = std::move(zeros);
  c.nu = std::move(nu);
  return c;
}

std::vector<double> solve_on_lines(const HarmonicModel& m, const std::vector<Complex>& fixed, const BoundaryDegree& nu,
                                   const std::vector<Complex>& anchors, const std::vector<Complex>& directions,
                                   std::vector<double> s, const NewtonOptions& opts) {
  const CircularDomain& d = m.domain();
  const int g = d.genus();
  check_nu(d, nu);
  if (static_cast<int>(anchors.size()) != g || directions.size() != anchors.size() || s.size() != anchors.size()) {
    throw DomainError("need exactly one anchor, direction and start value per inner circle");
  }
  if (static_cast<int>(fixed.size()) + g != std::accumulate(nu.begin(), nu.end(), 0)) {
    throw DomainError("fixed points plus free points must equal the total boundary degree");
  }
  if (g == 0) return s;

  Eigen::VectorXd target(g);
  for (int j = 1; j <= g; ++j) target(j - 1) = nu[static_cast<std::size_t>(j)];
  for (const Complex& z : fixed) target -= harmonic_measure_vector(m, z);

  auto point = [&](const std::vector<double>& x, int k) {
    const auto i = static_cast<std::size_t>(k);
    return anchors[i] + x[i] * directions[i];
  };
  auto inside = [&](const std::vector<double>& x) {
    for (int k = 0; k < g; ++k) {
      if (!d.contains(point(x, k))) return false;
    }
    return true;
  };
  auto residual = [&](const std::vector<double>& x) {
    Eigen::VectorXd F = -target;
    for (int k = 0; k < g; ++k) F += harmonic_measure_vector(m, point(x, k));
    return F;
  };

  Eigen::VectorXd F = residual(s);
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    if (max_abs(F) < opts.tol) {
      if (opts.require_inside && !inside(s)) throw NumericalError("completed zeros left the domain");
      return s;
    }
    Eigen::MatrixXd J(g, g);
    for (int k = 0; k < g; ++k) {
      const Eigen::MatrixX2d G = m.grad_all(point(s, k));
      const Complex dir = directions[static_cast<std::size_t>(k)];
      J.col(k) = G.col(0) * dir.real() + G.col(1) * dir.imag();
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    if (!lu.isInvertible() || lu.rcond() < 1e-14) throw NumericalError("condition (1) Jacobian is singular");
    const Eigen::VectorXd step = lu.solve(-F);

    double lam = 1.0;
    bool accepted = false;
    for (int half = 0; half < 40; ++half, lam *= 0.5) {
      std::vector<double> trial = s;
      for (int k = 0; k < g; ++k) trial[static_cast<std::size_t>(k)] += lam * step(k);
      if (opts.require_inside && !inside(trial)) continue;
      const Eigen::VectorXd Ft = residual(trial);
      if (Ft.norm() < (1.0 - 1e-4 * lam) * F.norm() || max_abs(Ft) < opts.tol) {
        s = std::move(trial);
        F = Ft;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      std::ostringstream os;
      os << "condition (1) Newton stalled with residual " << max_abs(F);
      throw NumericalError(os.str());
    }
  }
  if (max_abs(F) < opts.tol) {
    if (opts.require_inside && !inside(s)) throw NumericalError("completed zeros left the domain");
    return s;
  }
  std::ostringstream os;
  os << "condition (1) Newton did not converge in " << opts.max_iter << " iterations; residual " << max_abs(F);
  throw NumericalError(os.str());
}

std::vector<Complex> complete_zeros(const HarmonicModel& m, const std::vector<Complex>& fixed, const BoundaryDegree& nu,
                                    const std::vector<Complex>& guess, const NewtonOptions& opts) {
  const CircularDomain& d = m.domain();
  check_inside(d, guess, "guess");
  std::vector<Complex> dirs;
  for (const Complex& z : guess) {
    const int l = d.nearest_boundary(z).second;
    if (l == 0) {
      dirs.push_back(std::abs(z) > 0.0 ? -z / std::abs(z) : Complex{1.0});
    } else {
      const Complex r = z - d.boundary(l).center;
      dirs.push_back(r / std::abs(r));
    }
  }
  const std::vector<double> s =
      solve_on_lines(m, fixed, nu, guess, dirs, std::vector<double>(guess.size(), 0.0), opts);
  std::vector<Complex> out;
  for (std::size_t k = 0; k < guess.size(); ++k) out.push_back(guess[k] + s[k] * dirs[k]);
  return out;
}

ProperMap::ProperMap(ZeroConfig config, Fn base, Fn base_log_derivative, MobiusMap outer, std::string form)
    : config_(std::move(config)),
      base_(std::move(base)),
      base_logd_(std::move(base_log_derivative)),
      outer_(outer),
      form_(std::move(form)) {}

Complex ProperMap::operator()(Complex z) const { return outer_(base_(z)); }

Complex ProperMap::derivative(Complex z) const {
  if (base_logd_) {
    const Complex F = base_(z);
    return outer_.derivative(F) * F * base_logd_(z);
  }
  const double h = 1e-4;
  const Complex H{h, 0.0};
  return (-(*this)(z + 2.0 * H) + 8.0 * (*this)(z + H) - 8.0 * (*this)(z - H) + (*this)(z - 2.0 * H)) / (12.0 * h);
}

ProperMap ProperMap::with_outer(const MobiusMap& outer) const {
  ProperMap f = *this;
  f.outer_ = outer;
  return f;
}

ProperMap build_proper_map(const PrimeEvaluator& ev, const IntegralsFirstKind& v, const ZeroConfig& config,
                           double admissible_tol) {
  return build_product(share(ev, v), config, admissible_tol);
}

std::vector<double> slit_radius_products(const PrimeEvaluator& ev, const IndexedZeros& zeros) {
  const int g = ev.domain().genus();
  if (static_cast<int>(zeros.size()) != g + 1) throw DomainError("indexed zeros need one list per boundary circle");
  std::vector<double> prod(static_cast<std::size_t>(g + 1), 1.0);
  for (int l = 0; l <= g; ++l) {
    for (const Complex& p : zeros[static_cast<std::size_t>(l)]) {
      for (int i = 0; i <= g; ++i) {
        if (i == l) continue;
        prod[static_cast<std::size_t>(i)] *= slit_radius(ev, l, i, p).radius;
      }
    }
  }
  return prod;
}

double condition3_residual(const PrimeEvaluator& ev, const IndexedZeros& zeros) {
  const std::vector<double> prod = slit_radius_products(ev, zeros);
  const auto [lo, hi] = std::minmax_element(prod.begin(), prod.end());
  return *hi - *lo;
}

ProperMap build_proper_map_alt(const PrimeEvaluator& ev, const IndexedZeros& zeros, double tol) {
  const CircularDomain& d = ev.domain();
  const int g = d.genus();
  if (static_cast<int>(zeros.size()) != g + 1) throw DomainError("indexed zeros need one list per boundary circle");
  ZeroConfig config;
  for (const auto& list : zeros) {
    check_inside(d, list, "zero");
    config.nu.push_back(static_cast<int>(list.size()));
    config.zeros.insert(config.zeros.end(), list.begin(), list.end());
  }
  const std::vector<double> prod = slit_radius_products(ev, zeros);
  const auto [lo, hi] = std::minmax_element(prod.begin(), prod.end());
  if (*hi - *lo > tol) {
    std::ostringstream os;
    os << "indexed zeros violate the slit-radius product condition (spread " << *hi - *lo << ")";
    throw DomainError(os.str());
  }
  const double K = 1.0 / (std::accumulate(prod.begin(), prod.end(), 0.0) / static_cast<double>(prod.size()));
  auto evp = std::make_shared<const PrimeEvaluator>(ev);
  ProperMap::Fn base = [evp, zeros, K, g](Complex z) {
    Complex val{K};
    for (int l = 0; l <= g; ++l) {
      for (const Complex& p : zeros[static_cast<std::size_t>(l)]) val *= eta_l(*evp, l, z, p);
    }
    return val;
  };
  ProperMap::Fn logd = [evp, zeros, g](Complex z) {
    Complex val{0.0};
    for (int l = 0; l <= g; ++l) {
      for (const Complex& p : zeros[static_cast<std::size_t>(l)]) val += eta_l_log_derivative(*evp, l, z, p);
    }
    return val;
  };
  config.residual.assign(static_cast<std::size_t>(g), 0.0);
  ProperMap f(config, base, logd, MobiusMap::identity(), "slit_product");
  f = f.with_outer(rotation_map(1.0 / f.base(Complex{1.0})));
  require_boundary_modulus(f, d);
  return f;
}

double boundary_modulus_deviation(const std::function<Complex(Complex)>& f, const CircularDomain& d, int samples) {
  double dev = 0.0;
  for (int l = 0; l <= d.genus(); ++l) {
    for (int k = 0; k < samples; ++k) {
      const Complex w = d.boundary_point(l, 2.0 * kPi * k / samples);
      dev = std::max(dev, std::abs(std::abs(f(w)) - 1.0));
    }
  }
  return dev;
}

double boundary_modulus_deviation(const ProperMap& f, const CircularDomain& d, int samples) {
  return boundary_modulus_deviation([&f](Complex z) { return f(z); }, d, samples);
}

int boundary_degree(const std::function<Complex(Complex)>& f, const CircularDomain& d, int l, int samples) {
  if (l < 0 || l > d.genus()) throw DomainError("boundary index out of range: " + std::to_string(l));
  if (samples < 8) throw DomainError("boundary degree needs at least 8 samples");
  const double orient = l == 0 ? 1.0 : -1.0;
  auto at = [&](int k2) { return f(d.boundary_point(l, orient * kPi * k2 / samples)); };
  // Each step is also taken in two halves; disagreement means the argument is aliased.
  Complex prev = at(0);
  const Complex first = prev;
  double total = 0.0;
  for (int k = 1; k <= samples; ++k) {
    const Complex mid = at(2 * k - 1);
    const Complex cur = k == samples ? first : at(2 * k);
    if (cur == Complex{} || prev == Complex{} || mid == Complex{}) throw NumericalError("map vanishes on the boundary");
    const double inc = std::arg(cur / prev);
    const double halves = std::arg(mid / prev) + std::arg(cur / mid);
    if (std::abs(inc) > 0.75 * kPi || std::abs(halves - inc) > 1e-6) {
      throw NumericalError("boundary winding under-resolved on circle " + std::to_string(l) + "; use more samples");
    }
    total += inc;
    prev = cur;
  }
  const double turns = total / (2.0 * kPi);
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 0.01) {
    std::ostringstream os;
    os << "winding on circle " << l << " is " << turns << ", not close to an integer";
    throw NumericalError(os.str());
  }
  return static_cast<int>(rounded);
}

int boundary_degree(const ProperMap& f, const CircularDomain& d, int l, int samples) {
  return boundary_degree([&f](Complex z) { return f(z); }, d, l, samples);
}

std::vector<Complex> exponential_factor_turns(const IntegralsFirstKind& v, const BoundaryDegree& nu, int samples) {
  const CircularDomain& d = v.model().domain();
  check_nu(d, nu);
  std::vector<Complex> out;
  for (int i = 0; i <= d.genus(); ++i) {
    if (d.genus() == 0) {
      out.emplace_back(0.0);
      continue;
    }
    std::vector<Complex> path;
    for (int k = 0; k <= samples; ++k) path.push_back(d.boundary_point(i, 2.0 * kPi * k / samples));
    const auto vals = v.v_along(path);
    Complex s{0.0};
    for (int j = 1; j <= d.genus(); ++j) {
      s += static_cast<double>(nu[static_cast<std::size_t>(j)]) * (vals.back()(j - 1) - vals.front()(j - 1));
    }
    out.push_back(s);
  }
  return out;
}

std::vector<Complex> locate_zeros(const std::function<Complex(Complex)>& f, const std::vector<Complex>& seeds,
                                  double tol) {
  std::vector<Complex> out;
  const double h = 1e-6;
  for (Complex z : seeds) {
    for (int iter = 0; iter < 80; ++iter) {
      const Complex fz = f(z);
      if (std::abs(fz) < tol) break;
      const Complex df = (f(z + h) - f(z - h)) / (2.0 * h);
      if (df == Complex{}) throw NumericalError("zero search hit a critical point");
      const Complex step = fz / df;
      z -= step;
      if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    out.push_back(z);
  }
  return out;
}

ProperMap from_boundary_data(const HarmonicModel& m, const PrimeEvaluator& ev, const IntegralsFirstKind& v, Complex p,
                             const std::vector<std::vector<Complex>>& w, const std::vector<std::vector<double>>& lambda,
                             const BoundaryDataOptions& opts, BoundaryDataResult* result) {
  const CircularDomain& d = m.domain();
  const int g = d.genus();
  if (!d.contains(p)) throw DomainError("p must lie inside the domain");
  if (static_cast<int>(w.size()) != g + 1) throw DomainError("boundary points needed on every boundary circle");

  // Boundary points, projected exactly onto their circles, with inward normals.
  std::vector<std::vector<Complex>> pts(w.size());
  std::vector<std::vector<Complex>> normals(w.size());
  BoundaryDegree nu;
  for (int l = 0; l <= g; ++l) {
    const Circle c = d.boundary(l);
    const auto& list = w[static_cast<std::size_t>(l)];
    if (list.empty()) throw DomainError("each boundary circle needs at least one prescribed point");
    for (const Complex& z : list) {
      const double rad = std::abs(z - c.center);
      if (std::abs(rad - c.radius) > 1e-9 * std::max(1.0, c.radius)) {
        throw DomainError("prescribed point is not on boundary circle " + std::to_string(l));
      }
      const Complex proj = c.center + c.radius * (z - c.center) / rad;
      for (const Complex& other : pts[static_cast<std::size_t>(l)]) {
        if (std::abs(other - proj) < 1e-9) throw DomainError("prescribed boundary points must be distinct");
      }
      pts[static_cast<std::size_t>(l)].push_back(proj);
      normals[static_cast<std::size_t>(l)].push_back(d.inward_normal(l, proj));
    }
    nu.push_back(static_cast<int>(list.size()));
  }
  std::vector<std::vector<double>> rates(w.size());
  double max_rate = 1.0;
  for (int l = 0; l <= g; ++l) {
    const auto n_l = pts[static_cast<std::size_t>(l)].size();
    const bool given = static_cast<std::size_t>(l) < lambda.size();
    if (n_l > 1 && (!given || lambda[static_cast<std::size_t>(l)].size() != n_l - 1)) {
      throw DomainError("need one derivative ratio per extra point on circle " + std::to_string(l));
    }
    if (n_l == 1 && given && !lambda[static_cast<std::size_t>(l)].empty()) {
      throw DomainError("derivative ratios given for circle " + std::to_string(l) + " with a single point");
    }
    if (given) {
      for (double r : lambda[static_cast<std::size_t>(l)]) {
        if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("derivative ratios must be positive");
        max_rate = std::max(max_rate, r);
      }
      rates[static_cast<std::size_t>(l)] = lambda[static_cast<std::size_t>(l)];
    }
  }
  const int n = std::accumulate(nu.begin(), nu.end(), 0);
  const Complex w00 = pts[0][0];

  double alpha = 1.0;
  if (g > 0) {
    double mind = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= g; ++j) mind = std::min(mind, std::abs(m.normal_derivative(j, 0, w00)));
    alpha = 0.9 * mind;
  }

  // Without an explicit horizon the continuation runs until the tethered points are a
  // modest distance inside, so that the level set of f_T is well conditioned.
  double scale = 1.0;
  for (int l = 1; l <= g; ++l) scale = std::min(scale, d.boundary(l).radius);
  for (int l = 0; l <= g; ++l) {
    for (const Complex& z : pts[static_cast<std::size_t>(l)]) {
      for (int i = 0; i <= g; ++i) {
        if (i == l) continue;
        const Circle c = d.boundary(i);
        scale = std::min(scale, i == 0 ? 1.0 - std::abs(z) : std::abs(z - c.center) - c.radius);
      }
    }
  }
  const bool automatic = opts.horizon <= 0.0;
  const double T = alpha * (automatic ? 0.25 * scale / max_rate : opts.horizon);
  const double settle = 0.02 * scale;

  auto moving = [&](double t) {
    std::vector<Complex> out;
    const double r00 = t / alpha;
    for (int l = 0; l <= g; ++l) {
      const auto& list = pts[static_cast<std::size_t>(l)];
      for (std::size_t k = 0; k < list.size(); ++k) {
        if (l > 0 && k == 0) continue;
        const double rate = k == 0 ? 1.0 : rates[static_cast<std::size_t>(l)][k - 1];
        out.push_back(list[k] + rate * r00 * normals[static_cast<std::size_t>(l)][k]);
      }
    }
    return out;
  };
  std::vector<Complex> anchors;
  std::vector<Complex> dirs;
  for (int l = 1; l <= g; ++l) {
    anchors.push_back(pts[static_cast<std::size_t>(l)][0]);
    dirs.push_back(normals[static_cast<std::size_t>(l)][0]);
  }

  // Continuation of the tethered points.
  NewtonOptions nopts;
  nopts.require_inside = false;
  std::vector<double> s(static_cast<std::size_t>(g), 0.0);
  double t = 0.0;
  double dt = T / opts.steps;
  const double min_dt = T / (opts.steps * 1024.0);
  while (t < T * (1.0 - 1e-12)) {
    if (automatic && t > 0.0 && (g == 0 || *std::min_element(s.begin(), s.end()) >= settle) &&
        t / alpha >= settle) {
      break;
    }
    const double t_next = std::min(T, t + dt);
    std::vector<double> guess = s;
    if (t > 0.0) {
      for (double& x : guess) x *= t_next / t;
    }
    bool ok = false;
    try {
      guess = solve_on_lines(m, moving(t_next), nu, anchors, dirs, guess, nopts);
      ok = true;
      for (int k = 0; k < g; ++k) {
        if (!d.contains(anchors[static_cast<std::size_t>(k)] + guess[static_cast<std::size_t>(k)] * dirs[static_cast<std::size_t>(k)])) ok = false;
      }
    } catch (const NumericalError&) {
      ok = false;
    }
    if (!ok) {
      dt *= 0.5;
      if (dt < min_dt) {
        std::ostringstream os;
        os << "boundary-data continuation failed at t = " << t << " of " << T;
        throw NumericalError(os.str());
      }
      continue;
    }
    s = guess;
    t = t_next;
  }

  const double t_end = t;
  std::vector<Complex> level = moving(t_end);
  for (int k = 0; k < g; ++k) level.push_back(anchors[static_cast<std::size_t>(k)] + s[static_cast<std::size_t>(k)] * dirs[static_cast<std::size_t>(k)]);
  const Shared sh = share(ev, v);

  // Disk automorphism normalization: f_T = e^{i phi} mu_b(F_V), b = F_V(p), f_T(w_00) = 1.
  const ProperMap::Fn FV = product_base(sh, level, nu);
  const Complex b = FV(p);
  auto mu = [b](Complex x) { return (x - b) / (1.0 - std::conj(b) * x); };
  Complex rot = 1.0 / mu(FV(w00));
  rot /= std::abs(rot);
  const Complex zeta = -rot * b;

  // Track the level set F_V = c from c = 0 to c = b; the end points are the zeros of f_T.
  // The path bends off the segment so that it avoids critical values.
  auto track = [&](double bend, std::vector<Complex>& out) {
    std::vector<Complex> cur = level;
    double sfrac = 0.0;
    double ds = 1.0 / 32.0;
    while (sfrac < 1.0 - 1e-14) {
      const double s_next = std::min(1.0, sfrac + ds);
      const Complex target = s_next * b * std::polar(1.0, bend * std::sin(kPi * s_next));
      std::vector<Complex> trial = cur;
      bool ok = true;
      for (Complex& z : trial) {
        bool conv = false;
        for (int iter = 0; iter < 20 && d.contains(z); ++iter) {
          const Complex Fz = FV(z);
          const Complex G = Fz - target;
          if (std::abs(G) < 1e-13) {
            conv = true;
            break;
          }
          const double h = 1e-7;
          z -= G * (2.0 * h) / (FV(z + h) - FV(z - h));
        }
        if (!conv || !d.contains(z)) {
          ok = false;
          break;
        }
      }
      for (std::size_t i = 0; ok && i < trial.size(); ++i) {
        for (std::size_t k = i + 1; k < trial.size(); ++k) {
          if (std::abs(trial[i] - trial[k]) < 1e-6) ok = false;
        }
      }
      if (!ok) {
        ds *= 0.5;
        if (ds < 1e-5) return false;
        continue;
      }
      cur = trial;
      sfrac = s_next;
    }
    out = cur;
    return true;
  };
  std::vector<Complex> zeros;
  bool tracked = false;
  for (double bend : {0.4, -0.4, 1.0, -1.0, 0.0}) {
    if ((tracked = track(bend, zeros))) break;
  }
  if (!tracked) throw NumericalError("could not track the level set of the normalized map to its zeros");
  std::size_t ip = 0;
  for (std::size_t k = 1; k < zeros.size(); ++k) {
    if (std::abs(zeros[k] - p) < std::abs(zeros[ip] - p)) ip = k;
  }
  if (std::abs(zeros[ip] - p) > 1e-6) throw NumericalError("tracked zeros do not contain p");
  std::swap(zeros[0], zeros[ip]);
  zeros[0] = p;

  // Newton polish in zero coordinates: p fixed, n - 1 free zeros and the rotation angle.
  std::vector<std::pair<int, int>> all_pts;
  for (int l = 0; l <= g; ++l) {
    for (int k = 0; k < nu[static_cast<std::size_t>(l)]; ++k) all_pts.emplace_back(l, k);
  }
  const int nun = 2 * (n - 1) + 1;
  auto unpack = [&](const Eigen::VectorXd& x) {
    std::vector<Complex> z{p};
    for (int k = 1; k < n; ++k) z.emplace_back(x(2 * (k - 1)), x(2 * (k - 1) + 1));
    return z;
  };
  auto residual = [&](const Eigen::VectorXd& x) {
    const std::vector<Complex> z = unpack(x);
    const double phi = x(nun - 1);
    Eigen::VectorXd R(nun);
    int row = 0;
    Eigen::VectorXd us = Eigen::VectorXd::Zero(g);
    for (const Complex& zk : z) us += m.u_all(zk);
    for (int j = 1; j <= g; ++j) R(row++) = us(j - 1) - nu[static_cast<std::size_t>(j)];
    const ProperMap::Fn F = product_base(sh, z, nu);
    const ProperMap::Fn Fd = product_logd(sh, z, nu);
    const Complex e = std::polar(1.0, phi);
    double speed00 = 0.0;
    for (const auto& [l, k] : all_pts) {
      const Complex wk = pts[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)];
      const Complex Fw = F(wk);
      R(row++) = std::arg(e * Fw);
      const double speed = std::log(std::abs(Fw)) + std::log(std::abs(Fd(wk)));
      if (l == 0 && k == 0) {
        speed00 = speed;
      } else if (k > 0) {
        R(row++) = speed00 - speed - std::log(rates[static_cast<std::size_t>(l)][static_cast<std::size_t>(k - 1)]);
      }
    }
    return R;
  };
  Eigen::VectorXd x(nun);
  for (int k = 1; k < n; ++k) {
    x(2 * (k - 1)) = zeros[static_cast<std::size_t>(k)].real();
    x(2 * (k - 1) + 1) = zeros[static_cast<std::size_t>(k)].imag();
  }
  x(nun - 1) = -std::arg(product_base(sh, zeros, nu)(w00));
  auto zeros_inside = [&](const Eigen::VectorXd& xx) {
    for (const Complex& z : unpack(xx)) {
      if (!d.contains(z)) return false;
    }
    return true;
  };

  Eigen::VectorXd R = residual(x);
  for (int iter = 0; iter < opts.polish_max_iter && max_abs(R) >= opts.polish_tol; ++iter) {
    Eigen::MatrixXd J(nun, nun);
    for (int c = 0; c < nun; ++c) {
      const double h = 1e-7;
      Eigen::VectorXd xp = x;
      Eigen::VectorXd xm = x;
      xp(c) += h;
      xm(c) -= h;
      J.col(c) = (residual(xp) - residual(xm)) / (2.0 * h);
    }
    const Eigen::VectorXd step = J.colPivHouseholderQr().solve(-R);
    double lam = 1.0;
    bool accepted = false;
    for (int half = 0; half < 30; ++half, lam *= 0.5) {
      const Eigen::VectorXd xt = x + lam * step;
      if (!zeros_inside(xt)) continue;
      const Eigen::VectorXd Rt = residual(xt);
      if (Rt.norm() < R.norm()) {
        x = xt;
        R = Rt;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  const double polish_res = max_abs(R);
  if (polish_res > 1e-8) {
    std::ostringstream os;
    os << "boundary-data polish did not converge (residual " << polish_res << ")";
    throw NumericalError(os.str());
  }

  const std::vector<Complex> final_zeros = unpack(x);
  ZeroConfig config = make_zero_config(m, final_zeros, nu);
  ProperMap f(config, product_base(sh, final_zeros, nu), product_logd(sh, final_zeros, nu),
              rotation_map(std::polar(1.0, x(nun - 1))), "boundary_data");
  require_boundary_modulus(f, d);

  if (result != nullptr) {
    result->boundary_error = 0.0;
    for (int l = 0; l <= g; ++l) {
      for (const Complex& z : pts[static_cast<std::size_t>(l)]) {
        result->boundary_error = std::max(result->boundary_error, std::abs(f(z) - 1.0));
      }
    }
    result->zero_error = std::abs(f(p));
    result->ratio_error = 0.0;
    const double h = 1e-4;
    const double s00 = normal_speed(f, w00, normals[0][0], h);
    for (int l = 0; l <= g; ++l) {
      const auto& list = pts[static_cast<std::size_t>(l)];
      for (std::size_t k = 1; k < list.size(); ++k) {
        const double ratio = s00 / normal_speed(f, list[k], normals[static_cast<std::size_t>(l)][k], h);
        result->ratio_error =
            std::max(result->ratio_error, std::abs(ratio / rates[static_cast<std::size_t>(l)][k - 1] - 1.0));
      }
    }
    result->t_reached = t_end;
    result->polish_residual = polish_res;
    result->level_set = level;
    result->level_value = zeta;
  }
  return f;
}

Complex blaschke_eval(const std::vector<Complex>& zeros, Complex z) {
  Complex val{1.0};
  for (const Complex& p : zeros) {
    if (std::abs(p) >= 1.0) throw DomainError("Blaschke zeros must lie in the unit disk");
    val *= blaschke_factor(z, p) / blaschke_factor(Complex{1.0}, p);
  }
  return val;
}

ProperMap lift_blaschke(const PrimeEvaluator& ev, const IntegralsFirstKind& v, const std::vector<Complex>& zeros,
                        double admissible_tol) {
  const CircularDomain& d = ev.domain();
  const int g = d.genus();
  check_inside(d, zeros, "Blaschke zero");
  const HarmonicModel& m = v.model();
  Eigen::VectorXd us = Eigen::VectorXd::Zero(g);
  for (const Complex& z : zeros) us += m.u_all(z);
  BoundaryDegree nu(static_cast<std::size_t>(g + 1), 0);
  int inner = 0;
  for (int j = 1; j <= g; ++j) {
    nu[static_cast<std::size_t>(j)] = static_cast<int>(std::lround(us(j - 1)));
    inner += nu[static_cast<std::size_t>(j)];
  }
  nu[0] = static_cast<int>(zeros.size()) - inner;
  if (nu[0] < 0) throw DomainError("Blaschke zeros are not admissible");
  const ZeroConfig config = make_zero_config(m, zeros, nu);
  require_admissible(config, admissible_tol);
  require_single_valued(v, nu);

  auto words = std::make_shared<const std::vector<MobiusMap>>(ev.all_words());
  auto vp = std::make_shared<const IntegralsFirstKind>(v);
  std::vector<Complex> at_one;
  for (const MobiusMap& t : *words) {
    Complex b{1.0};
    for (const Complex& p : zeros) b *= m_ext(t.apply(Complex{1.0}), p);
    at_one.push_back(b);
  }
  ProperMap::Fn base = [words, vp, zeros, nu, at_one](Complex z) {
    Complex val = exp_factor(*vp, nu, z);
    for (std::size_t i = 0; i < words->size(); ++i) {
      const ExtendedComplex tz = (*words)[i].apply(z);
      Complex b{1.0};
      for (const Complex& p : zeros) b *= m_ext(tz, p);
      val *= b / at_one[i];
    }
    return val;
  };
  ProperMap f(config, base, nullptr, MobiusMap::identity(), "lifted_blaschke");
  f = f.with_outer(rotation_map(1.0 / f.base(Complex{1.0})));
  require_boundary_modulus(f, d);
  return f;
}

}  // namespace circmap
