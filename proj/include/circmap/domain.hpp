#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace circmap {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

/// Invalid geometry or an argument outside a function's domain of definition.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-convergence, singular evaluation, truncation-quality failures.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configured resource limit (word count, raster size) would be exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Circle {
  Complex center;
  double radius = 0.0;

  bool operator==(const Circle&) const = default;
};

/// Unit disk minus g disjoint closed disks. Boundary index 0 is the unit
/// circle, index l >= 1 is inner_circles[l - 1].
///
/// Construction does not validate; run validate_domain() (or
/// require_valid()) before handing a domain to the numerical modules.
class CircularDomain {
 public:
  CircularDomain() = default;
  explicit CircularDomain(std::vector<Circle> inner) : inner_(std::move(inner)) {}

  int genus() const { return static_cast<int>(inner_.size()); }
  int boundary_count() const { return genus() + 1; }

  const std::vector<Circle>& inner_circles() const { return inner_; }

  /// Boundary circle l in 0..g; l = 0 is the unit circle.
  Circle boundary(int l) const;

  /// Point on boundary l at parameter t (counterclockwise about its center).
  Complex boundary_point(int l, double t) const;

  /// Strictly inside Omega with margin `tol` from every boundary circle.
  bool contains(Complex z, double tol = 0.0) const;

  /// Signed distance to the nearest boundary circle (positive inside Omega)
  /// together with that circle's index.
  std::pair<double, int> nearest_boundary(Complex z) const;

  /// Unit normal of boundary l at w, pointing into Omega.
  Complex inward_normal(int l, Complex w) const;

  bool operator==(const CircularDomain&) const = default;

 private:
  std::vector<Circle> inner_;
};

enum class ConvergenceClass { real_axis_centers, well_separated, unverified };

std::string to_string(ConvergenceClass c);

struct ValidationReport {
  bool is_valid = false;
  double separation = 0.0;
  ConvergenceClass convergence_class = ConvergenceClass::unverified;
  std::vector<std::string> messages;
};

ValidationReport validate_domain(const CircularDomain& d);

/// Throws DomainError carrying the report messages when `d` is invalid.
void require_valid(const CircularDomain& d);

/// Reflection in boundary circle l: q + r^2 / (conj(z) - conj(q)).
Complex reflect(const CircularDomain& d, int l, Complex z);

/// A point of the Riemann sphere.
struct ExtendedComplex {
  Complex value{};
  bool infinite = false;

  static ExtendedComplex infinity() { return {Complex{}, true}; }
  bool is_finite() const { return !infinite; }
};

/// z -> (a z + b) / (c z + d).
struct MobiusMap {
  Complex a{1.0}, b{0.0}, c{0.0}, d{1.0};

  static MobiusMap identity() { return {}; }

  Complex determinant() const { return a * d - b * c; }

  /// Finite-plane evaluation. The pole maps to the point at infinity.
  ExtendedComplex apply(Complex z) const;
  ExtendedComplex apply(ExtendedComplex z) const;

  /// Evaluation that throws DomainError at the pole.
  Complex operator()(Complex z) const;

  /// Derivative (ad - bc) / (cz + d)^2.
  Complex derivative(Complex z) const;

  /// Preimage of infinity, or infinity itself for affine maps.
  ExtendedComplex pole() const;

  /// Divide through so that ad - bc = 1.
  MobiusMap normalized() const;
};

/// (m1 o m2)(z) = m1(m2(z)).
MobiusMap mobius_compose(const MobiusMap& m1, const MobiusMap& m2);
MobiusMap mobius_invert(const MobiusMap& m);
ExtendedComplex mobius_apply(const MobiusMap& m, Complex z);

/// True when the two maps agree as projective matrices to relative `tol`.
bool mobius_equal(const MobiusMap& m1, const MobiusMap& m2, double tol = 1e-12);

/// Blaschke factor (z - p) / (1 - conj(p) z).
inline Complex blaschke_factor(Complex z, Complex p) {
  return (z - p) / (1.0 - std::conj(p) * z);
}

// Domain JSON: {"inner_circles":[{"q":[re,im],"r":real},...]}
CircularDomain domain_from_json_text(const std::string& text);
std::string domain_to_json_text(const CircularDomain& d);
CircularDomain load_domain(const std::string& path);

}  // namespace circmap
