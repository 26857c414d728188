#include "circmap/function_theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace circmap {

namespace {

int basis_size(int g, int N) { return 1 + 2 * N + g * (1 + 2 * N); }

// Real basis values at z: constant, Re/Im z^k, then per circle log and Re/Im t^k.
void real_basis(const CircularDomain& d, int N, Complex z, double* out) {
  int col = 0;
  out[col++] = 1.0;
  Complex zk{1.0};
  for (int k = 1; k <= N; ++k) {
    zk *= z;
    out[col++] = zk.real();
    out[col++] = zk.imag();
  }
  for (const auto& c : d.inner_circles()) {
    const Complex s = z - c.center;
    out[col++] = std::log(std::abs(s) / c.radius);
    const Complex t = c.radius / s;
    Complex tk{1.0};
    for (int k = 1; k <= N; ++k) {
      tk *= t;
      out[col++] = tk.real();
      out[col++] = tk.imag();
    }
  }
}

// Complex coefficients of the analytic completion, per term:
// 1, z^k (N), then per circle log((z-q)/r), t^k (N).
Eigen::MatrixXcd completion_coefficients(int g, int N, const Eigen::MatrixXd& coef) {
  const int terms = 1 + N + g * (1 + N);
  Eigen::MatrixXcd out(terms, coef.cols());
  for (int j = 0; j < coef.cols(); ++j) {
    int col = 0;
    int row = 0;
    out(row++, j) = coef(col++, j);
    for (int k = 1; k <= N; ++k, col += 2) out(row++, j) = Complex{coef(col, j), -coef(col + 1, j)};
    for (int l = 0; l < g; ++l) {
      out(row++, j) = coef(col++, j);
      for (int k = 1; k <= N; ++k, col += 2) out(row++, j) = Complex{coef(col, j), -coef(col + 1, j)};
    }
  }
  return out;
}

void complex_terms(const CircularDomain& d, int N, Complex z, Eigen::VectorXcd& val, Eigen::VectorXcd& der) {
  const int g = d.genus();
  val.resize(1 + N + g * (1 + N));
  der.resize(val.size());
  int row = 0;
  val(row) = 1.0;
  der(row++) = 0.0;
  Complex zk{1.0};
  for (int k = 1; k <= N; ++k) {
    der(row) = static_cast<double>(k) * zk;
    zk *= z;
    val(row++) = zk;
  }
  for (const auto& c : d.inner_circles()) {
    const Complex s = z - c.center;
    val(row) = std::log(s / c.radius);
    der(row++) = 1.0 / s;
    const Complex t = c.radius / s;
    Complex tk{1.0};
    for (int k = 1; k <= N; ++k) {
      tk *= t;
      val(row) = tk;
      der(row++) = -static_cast<double>(k) * tk / s;
    }
  }
}

}  // namespace

HarmonicModel::HarmonicModel(CircularDomain d, int order, Eigen::MatrixXd coefficients, double residual,
                             double condition)
    : domain_(std::move(d)), order_(order), coef_(std::move(coefficients)), residual_(residual), condition_(condition) {}

Eigen::VectorXd HarmonicModel::u_all(Complex z) const {
  Eigen::VectorXd phi(coef_.rows());
  real_basis(domain_, order_, z, phi.data());
  return coef_.transpose() * phi;
}

double HarmonicModel::u(int j, Complex z) const {
  if (j < 0 || j > genus()) throw DomainError("harmonic measure index out of range");
  const Eigen::VectorXd all = u_all(z);
  return j == 0 ? 1.0 - all.sum() : all(j - 1);
}

Eigen::VectorXcd HarmonicModel::U_all(Complex z) const {
  Eigen::VectorXcd val, der;
  complex_terms(domain_, order_, z, val, der);
  return completion_coefficients(genus(), order_, coef_).transpose() * val;
}

Eigen::VectorXcd HarmonicModel::dU_all(Complex z) const {
  Eigen::VectorXcd val, der;
  complex_terms(domain_, order_, z, val, der);
  return completion_coefficients(genus(), order_, coef_).transpose() * der;
}

Complex HarmonicModel::U(int j, Complex z) const {
  if (j < 1 || j > genus()) throw DomainError("completion index out of range");
  return U_all(z)(j - 1);
}

Eigen::MatrixX2d HarmonicModel::grad_all(Complex z) const {
  const Eigen::VectorXcd dU = dU_all(z);
  Eigen::MatrixX2d out(genus(), 2);
  for (int j = 0; j < genus(); ++j) {
    out(j, 0) = dU(j).real();
    out(j, 1) = -dU(j).imag();
  }
  return out;
}

std::array<double, 2> HarmonicModel::grad_u(int j, Complex z) const {
  if (j < 0 || j > genus()) throw DomainError("harmonic measure index out of range");
  const Eigen::MatrixX2d g = grad_all(z);
  if (j == 0) return {-g.col(0).sum(), -g.col(1).sum()};
  return {g(j - 1, 0), g(j - 1, 1)};
}

double HarmonicModel::log_coefficient(int j, int l) const {
  if (j < 1 || j > genus() || l < 1 || l > genus()) throw DomainError("log coefficient index out of range");
  return coef_(1 + 2 * order_ + (l - 1) * (1 + 2 * order_), j - 1);
}

double HarmonicModel::normal_derivative(int j, int l, Complex w) const {
  const Complex n = domain_.inward_normal(l, w);
  const auto g = grad_u(j, w);
  return g[0] * n.real() + g[1] * n.imag();
}

HarmonicModel solve_harmonic_measures(const CircularDomain& d, int N, int M) {
  require_valid(d);
  const int g = d.genus();
  if (N < 1) throw DomainError("basis order must be positive");
  if (M < 4 * N) throw DomainError("need at least 4N collocation points per circle");
  const int cols = basis_size(g, N);
  const int rows = M * (g + 1);
  if (g == 0) return HarmonicModel(d, N, Eigen::MatrixXd(cols, 0), 0.0, 1.0);

  Eigen::MatrixXd A(rows, cols);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(rows, g);
  std::vector<double> buf(static_cast<std::size_t>(cols));
  for (int l = 0; l <= g; ++l) {
    for (int m = 0; m < M; ++m) {
      const Complex w = d.boundary_point(l, 2.0 * kPi * m / M);
      real_basis(d, N, w, buf.data());
      const int row = l * M + m;
      for (int c = 0; c < cols; ++c) A(row, c) = buf[static_cast<std::size_t>(c)];
      if (l >= 1) rhs(row, l - 1) = 1.0;
    }
  }
  // Column equilibration before the SVD.
  Eigen::VectorXd scale = A.colwise().norm().transpose();
  for (int c = 0; c < cols; ++c) {
    if (scale(c) == 0.0) scale(c) = 1.0;
    A.col(c) /= scale(c);
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double condition = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
  if (!(condition < 1e13)) {
    throw NumericalError("harmonic measure system is ill-conditioned (condition " + std::to_string(condition) +
                         "); use a smaller basis order or a better separated domain");
  }
  Eigen::MatrixXd coef = svd.solve(rhs);
  for (int c = 0; c < cols; ++c) coef.row(c) /= scale(c);

  HarmonicModel model(d, N, coef, 0.0, condition);
  double residual = 0.0;
  for (int l = 0; l <= g; ++l) {
    for (int m = 0; m < 2 * M; ++m) {
      const Complex w = d.boundary_point(l, 2.0 * kPi * (m + 0.5) / (2 * M));
      const Eigen::VectorXd u = model.u_all(w);
      for (int j = 1; j <= g; ++j) residual = std::max(residual, std::abs(u(j - 1) - (l == j ? 1.0 : 0.0)));
    }
  }
  return HarmonicModel(d, N, std::move(coef), residual, condition);
}

double eval_u(const HarmonicModel& m, int j, Complex z) { return m.u(j, z); }

std::array<double, 2> eval_grad_u(const HarmonicModel& m, int j, Complex z) { return m.grad_u(j, z); }

Eigen::MatrixXd normal_derivative_matrix(const HarmonicModel& m, const std::vector<Complex>& points) {
  const int g = m.genus();
  if (static_cast<int>(points.size()) != g) throw DomainError("need one point per inner circle");
  Eigen::MatrixXd out(g, g);
  for (int k = 1; k <= g; ++k) {
    for (int j = 1; j <= g; ++j) out(j - 1, k - 1) = m.normal_derivative(j, k, points[static_cast<std::size_t>(k - 1)]);
  }
  return out;
}

IntegralsFirstKind::IntegralsFirstKind(const HarmonicModel& m) : model_(std::make_shared<HarmonicModel>(m)) {
  const int g = m.genus();
  Eigen::MatrixXd C(g, g);
  for (int k = 1; k <= g; ++k) {
    for (int i = 1; i <= g; ++i) C(k - 1, i - 1) = m.log_coefficient(k, i);
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(C);
  if (g > 0 && !lu.isInvertible()) throw NumericalError("period system of the harmonic measures is singular");
  D_ = g > 0 ? Eigen::MatrixXd(lu.inverse()) : Eigen::MatrixXd(0, 0);
  offset_ = Eigen::VectorXcd::Zero(g);
  if (g > 0) offset_ = v_all(Complex{1.0, 0.0});
}

Eigen::VectorXcd IntegralsFirstKind::v_all(Complex z) const {
  if (genus() == 0) return Eigen::VectorXcd(0);
  const Eigen::VectorXcd U = model_->U_all(z);
  return (D_.cast<Complex>() * U) / (2.0 * kPi * kI) - offset_;
}

Complex IntegralsFirstKind::v(int j, Complex z) const {
  if (j < 1 || j > genus()) throw DomainError("integral index out of range");
  return v_all(z)(j - 1);
}

Eigen::VectorXcd IntegralsFirstKind::dv_all(Complex z) const {
  if (genus() == 0) return Eigen::VectorXcd(0);
  return (D_.cast<Complex>() * model_->dU_all(z)) / (2.0 * kPi * kI);
}

std::vector<Eigen::VectorXcd> IntegralsFirstKind::v_along(const std::vector<Complex>& path) const {
  const int g = genus();
  std::vector<Eigen::VectorXcd> out;
  if (path.empty()) return out;
  const auto& circles = model_->domain().inner_circles();
  Eigen::MatrixXd DC(g, g);
  for (int j = 0; j < g; ++j) {
    for (int l = 0; l < g; ++l) {
      double s = 0.0;
      for (int k = 0; k < g; ++k) s += D_(j, k) * model_->log_coefficient(k + 1, l + 1);
      DC(j, l) = s;
    }
  }
  std::vector<double> angle(static_cast<std::size_t>(g));
  for (int l = 0; l < g; ++l) angle[static_cast<std::size_t>(l)] = std::arg(path[0] - circles[static_cast<std::size_t>(l)].center);
  for (std::size_t n = 0; n < path.size(); ++n) {
    if (n > 0) {
      for (int l = 0; l < g; ++l) {
        const Complex q = circles[static_cast<std::size_t>(l)].center;
        const double step = std::arg((path[n] - q) / (path[n - 1] - q));
        if (std::abs(step) >= kPi / 2) throw NumericalError("branch tracking step too large along path");
        angle[static_cast<std::size_t>(l)] += step;
      }
    }
    Eigen::VectorXcd val = v_all(path[n]);
    for (int l = 0; l < g; ++l) {
      const Complex q = circles[static_cast<std::size_t>(l)].center;
      const double sheets = std::round((angle[static_cast<std::size_t>(l)] - std::arg(path[n] - q)) / (2.0 * kPi));
      if (sheets != 0.0) {
        for (int j = 0; j < g; ++j) val(j) += sheets * DC(j, l);
      }
    }
    out.push_back(std::move(val));
  }
  return out;
}

Eigen::VectorXcd IntegralsFirstKind::increment(Complex from, Complex to) const {
  double dmin = std::numeric_limits<double>::infinity();
  for (const auto& c : model_->domain().inner_circles()) {
    const Complex dir = to - from;
    double t = std::norm(dir) > 0.0 ? std::real((c.center - from) * std::conj(dir)) / std::norm(dir) : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    dmin = std::min(dmin, std::abs(from + t * dir - c.center));
  }
  if (dmin == 0.0) throw NumericalError("path passes through a circle center");
  const int steps = std::isfinite(dmin) ? static_cast<int>(std::ceil(std::abs(to - from) / (0.5 * dmin))) + 1 : 1;
  std::vector<Complex> path;
  for (int s = 0; s <= steps; ++s) path.push_back(from + (to - from) * (static_cast<double>(s) / steps));
  const auto vals = v_along(path);
  return vals.back() - vals.front();
}

Complex IntegralsFirstKind::period(int j, int i, int samples) const {
  if (j < 1 || j > genus()) throw DomainError("integral index out of range");
  const Circle c = model_->domain().boundary(i);
  Complex sum{0.0};
  for (int m = 0; m < samples; ++m) {
    const double t = 2.0 * kPi * m / samples;
    const Complex e = std::polar(1.0, t);
    const Complex w = c.center + c.radius * e;
    const Complex dz = kI * c.radius * e * (2.0 * kPi / samples);
    sum += dv_all(w)(j - 1) * dz;
  }
  return sum;
}

Eigen::MatrixXcd IntegralsFirstKind::tau() const { return D_.cast<Complex>() * Complex{0.0, -1.0 / kPi}; }

IntegralsFirstKind integrals_first_kind(const HarmonicModel& m) { return IntegralsFirstKind(m); }

PeriodMatrix period_matrix(const IntegralsFirstKind& v, const CircularDomain& d) {
  const int g = d.genus();
  PeriodMatrix out;
  out.tau = Eigen::MatrixXcd::Zero(g, g);
  const auto& circles = d.inner_circles();
  for (int i = 1; i <= g; ++i) {
    const Circle ci = circles[static_cast<std::size_t>(i - 1)];
    // Candidate w on gamma_i whose outward radial segment to the unit circle stays in the closure of Omega.
    std::vector<std::pair<double, Complex>> candidates;
    constexpr int kSamples = 96;
    for (int s = 0; s < kSamples; ++s) {
      const Complex e = std::polar(1.0, 2.0 * kPi * s / kSamples);
      const Complex w = ci.center + ci.radius * e;
      if (std::abs(w) < 1e-6) continue;
      const Complex u = w / std::abs(w);
      if (std::real(e * std::conj(u)) <= 0.2) continue;
      double clearance = 1.0 - std::abs(w);
      for (int l = 1; l <= g; ++l) {
        if (l == i) continue;
        const Circle cl = circles[static_cast<std::size_t>(l - 1)];
        const double t = std::clamp(std::real((cl.center - w) * std::conj(u)), 0.0, 1.0 - std::abs(w));
        clearance = std::min(clearance, std::abs(w + t * u - cl.center) - cl.radius);
      }
      if (clearance > 0.0) candidates.emplace_back(clearance, w);
    }
    if (candidates.size() < 3) throw NumericalError("period matrix: no admissible base points on circle " + std::to_string(i));
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<Eigen::VectorXcd> evals;
    for (int b = 0; b < 3; ++b) {
      // Spread the three base points over the admissible arc.
      const Complex w = candidates[static_cast<std::size_t>(b * (candidates.size() - 1) / 2)].second;
      const Complex e = w / std::abs(w);
      // From z0 = 1/conj(w) inward to the unit circle the values are conj(v) at the
      // reflected points, which retrace the segment e -> w; continue from e to w.
      const int steps = 64;
      std::vector<Complex> path;
      for (int s = 0; s <= steps; ++s) path.push_back(e + (w - e) * (static_cast<double>(s) / steps));
      const auto vals = v.v_along(path);
      const Eigen::VectorXcd at_w = vals.back();
      const Eigen::VectorXcd at_z0 = at_w.conjugate();
      evals.push_back(at_w - at_z0);
    }
    for (int j = 1; j <= g; ++j) out.tau(i - 1, j - 1) = evals[0](j - 1);
    for (const auto& e : evals) out.base_point_spread = std::max(out.base_point_spread, (e - evals[0]).cwiseAbs().maxCoeff());
  }
  return out;
}

double har_relation_residual(const HarmonicModel& m, const IntegralsFirstKind& v, const PeriodMatrix& tau, Complex z) {
  if (m.genus() == 0) return 0.0;
  const Eigen::VectorXcd vz = v.v_all(z);
  const Eigen::VectorXd u = m.u_all(z);
  const Eigen::VectorXcd lhs = 2.0 * kI * vz.imag().cast<Complex>();
  const Eigen::VectorXcd rhs = tau.tau.transpose() * u.cast<Complex>();
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

}  // namespace circmap
