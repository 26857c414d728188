#include "circmap/domain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace circmap {

Circle CircularDomain::boundary(int l) const {
  if (l == 0) return Circle{Complex{0.0, 0.0}, 1.0};
  if (l < 0 || l > genus()) throw DomainError("boundary index out of range: " + std::to_string(l));
  return inner_[static_cast<std::size_t>(l - 1)];
}

Complex CircularDomain::boundary_point(int l, double t) const {
  const Circle c = boundary(l);
  return c.center + c.radius * std::polar(1.0, t);
}

bool CircularDomain::contains(Complex z, double tol) const {
  if (std::abs(z) >= 1.0 - tol) return false;
  for (const auto& c : inner_) {
    if (std::abs(z - c.center) <= c.radius + tol) return false;
  }
  return true;
}

std::pair<double, int> CircularDomain::nearest_boundary(Complex z) const {
  double best = 1.0 - std::abs(z);
  int idx = 0;
  for (int l = 1; l <= genus(); ++l) {
    const Circle& c = inner_[static_cast<std::size_t>(l - 1)];
    const double dist = std::abs(z - c.center) - c.radius;
    if (dist < best) {
      best = dist;
      idx = l;
    }
  }
  return {best, idx};
}

Complex CircularDomain::inward_normal(int l, Complex w) const {
  const Circle c = boundary(l);
  const Complex radial = (w - c.center) / std::abs(w - c.center);
  return l == 0 ? -radial : radial;
}

std::string to_string(ConvergenceClass c) {
  switch (c) {
    case ConvergenceClass::real_axis_centers:
      return "real_axis_centers";
    case ConvergenceClass::well_separated:
      return "well_separated";
    case ConvergenceClass::unverified:
      return "unverified";
  }
  return "unverified";
}

ValidationReport validate_domain(const CircularDomain& d) {
  ValidationReport rep;
  const auto& circles = d.inner_circles();
  const int g = d.genus();

  // Empty constraint set: separation is reported as the unit radius.
  double separation = 1.0;
  bool ok = true;
  double max_r = 0.0;
  double min_outer_gap = std::numeric_limits<double>::infinity();
  double min_pair_gap = std::numeric_limits<double>::infinity();

  for (int l = 0; l < g; ++l) {
    const Circle& c = circles[static_cast<std::size_t>(l)];
    if (!std::isfinite(c.radius) || !std::isfinite(c.center.real()) || !std::isfinite(c.center.imag())) {
      rep.messages.push_back("circle " + std::to_string(l + 1) + ": non-finite parameters");
      ok = false;
      continue;
    }
    if (c.radius <= 0.0) {
      rep.messages.push_back("circle " + std::to_string(l + 1) + ": radius must be positive");
      ok = false;
    }
    separation = std::min(separation, c.radius);
    const double gap = 1.0 - std::abs(c.center) - c.radius;
    if (gap <= 0.0) {
      rep.messages.push_back("circle " + std::to_string(l + 1) + ": not strictly inside the unit disk (|q|+r >= 1)");
      ok = false;
    }
    separation = std::min(separation, gap);
    min_outer_gap = std::min(min_outer_gap, gap);
    max_r = std::max(max_r, c.radius);
  }
  for (int i = 0; i < g; ++i) {
    for (int j = i + 1; j < g; ++j) {
      const Circle& a = circles[static_cast<std::size_t>(i)];
      const Circle& b = circles[static_cast<std::size_t>(j)];
      const double gap = std::abs(a.center - b.center) - a.radius - b.radius;
      if (gap <= 0.0) {
        rep.messages.push_back("circles " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                               " intersect or touch");
        ok = false;
      }
      separation = std::min(separation, gap);
      min_pair_gap = std::min(min_pair_gap, gap);
    }
  }

  rep.is_valid = ok;
  rep.separation = separation;

  const bool real_axis = std::all_of(circles.begin(), circles.end(),
                                     [](const Circle& c) { return c.center.imag() == 0.0; });
  if (real_axis) {
    rep.convergence_class = ConvergenceClass::real_axis_centers;
  } else if (ok && max_r / min_pair_gap < 0.25 && max_r / min_outer_gap < 0.25) {
    rep.convergence_class = ConvergenceClass::well_separated;
  } else {
    rep.convergence_class = ConvergenceClass::unverified;
    if (ok) rep.messages.push_back("prime-function product convergence not guaranteed; check residuals");
  }
  return rep;
}

void require_valid(const CircularDomain& d) {
  const ValidationReport rep = validate_domain(d);
  if (rep.is_valid) return;
  std::string msg = "invalid circular domain";
  for (const auto& m : rep.messages) msg += "; " + m;
  throw DomainError(msg);
}

Complex reflect(const CircularDomain& d, int l, Complex z) {
  const Circle c = d.boundary(l);
  const Complex den = std::conj(z) - std::conj(c.center);
  if (std::abs(den) == 0.0) throw DomainError("reflection evaluated at the circle center");
  return c.center + c.radius * c.radius / den;
}

ExtendedComplex MobiusMap::apply(Complex z) const {
  const Complex den = c * z + d;
  if (den == Complex{}) return ExtendedComplex::infinity();
  return {(a * z + b) / den, false};
}

ExtendedComplex MobiusMap::apply(ExtendedComplex z) const {
  if (z.is_finite()) return apply(z.value);
  if (c == Complex{}) return ExtendedComplex::infinity();
  return {a / c, false};
}

Complex MobiusMap::operator()(Complex z) const {
  const ExtendedComplex w = apply(z);
  if (!w.is_finite()) throw DomainError("Mobius map evaluated at its pole");
  return w.value;
}

Complex MobiusMap::derivative(Complex z) const {
  const Complex den = c * z + d;
  return determinant() / (den * den);
}

ExtendedComplex MobiusMap::pole() const {
  if (c == Complex{}) return ExtendedComplex::infinity();
  return {-d / c, false};
}

MobiusMap MobiusMap::normalized() const {
  const Complex s = std::sqrt(determinant());
  return {a / s, b / s, c / s, d / s};
}

MobiusMap mobius_compose(const MobiusMap& m1, const MobiusMap& m2) {
  MobiusMap r{m1.a * m2.a + m1.b * m2.c, m1.a * m2.b + m1.b * m2.d, m1.c * m2.a + m1.d * m2.c,
              m1.c * m2.b + m1.d * m2.d};
  // Keep entries O(1); long words otherwise drift toward over/underflow.
  const double scale = std::max({std::abs(r.a), std::abs(r.b), std::abs(r.c), std::abs(r.d)});
  if (scale > 0.0) {
    r.a /= scale;
    r.b /= scale;
    r.c /= scale;
    r.d /= scale;
  }
  return r;
}

MobiusMap mobius_invert(const MobiusMap& m) {
  if (m.determinant() == Complex{}) throw DomainError("degenerate Mobius map");
  return {m.d, -m.b, -m.c, m.a};
}

ExtendedComplex mobius_apply(const MobiusMap& m, Complex z) { return m.apply(z); }

bool mobius_equal(const MobiusMap& m1, const MobiusMap& m2, double tol) {
  // Projective equality: find the scalar from the largest entry of m2.
  const Complex e1[4] = {m1.a, m1.b, m1.c, m1.d};
  const Complex e2[4] = {m2.a, m2.b, m2.c, m2.d};
  int k = 0;
  for (int i = 1; i < 4; ++i) {
    if (std::abs(e2[i]) > std::abs(e2[k])) k = i;
  }
  if (std::abs(e1[k]) == 0.0) return false;
  const Complex s = e2[k] / e1[k];
  double scale = 0.0;
  double err = 0.0;
  for (int i = 0; i < 4; ++i) {
    scale = std::max(scale, std::abs(e2[i]));
    err = std::max(err, std::abs(e1[i] * s - e2[i]));
  }
  return err <= tol * scale;
}

CircularDomain domain_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError(std::string("domain JSON parse error: ") + e.what());
  }
  if (!j.is_object() || !j.contains("inner_circles") || !j["inner_circles"].is_array()) {
    throw DomainError("domain JSON must be an object with an \"inner_circles\" array");
  }
  std::vector<Circle> circles;
  for (const auto& c : j["inner_circles"]) {
    if (!c.is_object() || !c.contains("q") || !c.contains("r") || !c["q"].is_array() || c["q"].size() != 2 ||
        !c["r"].is_number()) {
      throw DomainError("each inner circle needs \"q\":[re,im] and \"r\":real");
    }
    circles.push_back(Circle{Complex{c["q"][0].get<double>(), c["q"][1].get<double>()}, c["r"].get<double>()});
  }
  return CircularDomain(std::move(circles));
}

std::string domain_to_json_text(const CircularDomain& d) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : d.inner_circles()) {
    arr.push_back({{"q", {c.center.real(), c.center.imag()}}, {"r", c.radius}});
  }
  nlohmann::json j;
  j["inner_circles"] = arr;
  return j.dump();
}

CircularDomain load_domain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open domain file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return domain_from_json_text(ss.str());
}

}  // namespace circmap
