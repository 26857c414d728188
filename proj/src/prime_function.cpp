#include "circmap/prime_function.hpp"

#include <cmath>
#include <iostream>

#include "circmap/function_theory.hpp"

namespace circmap {

namespace {

constexpr double kSingularTol = 1e-8;
constexpr std::size_t kLogSpaceThreshold = 1000;
constexpr std::size_t kChunk = 32;

void check_nonsingular(Complex value, Complex scale, const char* what) {
  if (std::norm(value) <= kSingularTol * kSingularTol * std::norm(scale)) {
    throw NumericalError(std::string("prime function: ") + what + " is within tolerance of a fixed point");
  }
}

}  // namespace

PrimeEvaluator::PrimeEvaluator(CircularDomain d, int word_length, bool mirrored) : domain_(std::move(d)) {
  if (domain_.genus() == 0) {
    enumeration_ = enumerate_words(0, 0);
  } else if (word_length < 0) {
    const WordLengthChoice choice = choose_word_length(domain_);
    if (!choice.converged) {
      std::cerr << "warning: Schottky tail estimate " << choice.tail << " at L=" << choice.length
                << " is above 1e-10\n";
    }
    enumeration_ = enumerate_words(domain_.genus(), choice.length);
  } else {
    enumeration_ = enumerate_words(domain_.genus(), word_length);
  }
  build(mirrored);
}

PrimeEvaluator::PrimeEvaluator(CircularDomain d, WordEnumeration e, bool mirrored)
    : domain_(std::move(d)), enumeration_(std::move(e)) {
  build(mirrored);
}

void PrimeEvaluator::build(bool mirrored) {
  all_words_ = realize_all(domain_, enumeration_);
  half_set_.clear();
  for (std::size_t i = 1; i < all_words_.size(); ++i) {
    if (enumeration_.half_set_mask[i] != mirrored) half_set_.push_back(all_words_[i]);
  }
  if (domain_.genus() > 0) {
    tail_ = tail_estimate(domain_, enumeration_.max_length);
    tail_converged_ = tail_ < 1e-10;
  }
}

Complex PrimeEvaluator::omega_projective(Complex z, Complex num, Complex den) const {
  const Complex lead = z * den - num;
  const bool log_space = half_set_.size() > kLogSpaceThreshold;
  Complex prod{1.0};
  Complex log_sum{0.0};
  std::size_t in_chunk = 0;
  for (const auto& t : half_set_) {
    // theta(y) = N / D and theta(z) = Nz / Dz in projective form.
    const Complex N = t.a * num + t.b * den;
    const Complex D = t.c * num + t.d * den;
    const Complex Nz = t.a * z + t.b;
    const Complex Dz = t.c * z + t.d;
    const Complex fy = num * D - den * N;
    const Complex fz = z * Dz - Nz;
    check_nonsingular(fy, den * D, "second argument");
    check_nonsingular(fz, Dz, "first argument");
    prod *= (z * D - N) * (num * Dz - den * Nz) / (fy * fz);
    // Partial products of kChunk near-unity factors are folded into a log sum.
    if (log_space && ++in_chunk == kChunk) {
      log_sum += std::log(prod);
      prod = 1.0;
      in_chunk = 0;
    }
  }
  if (!log_space) return lead * prod;
  return lead * std::exp(log_sum + std::log(prod));
}

Complex PrimeEvaluator::omega(Complex z, Complex y) const { return omega_projective(z, y, Complex{1.0}); }

Complex PrimeEvaluator::omega_log_derivative(Complex z, Complex y) const {
  return omega_log_derivative_projective(z, y, Complex{1.0});
}

Complex PrimeEvaluator::omega_log_derivative_projective(Complex z, Complex num, Complex den) const {
  Complex sum = den / (z * den - num);
  for (const auto& t : half_set_) {
    const Complex N = t.a * num + t.b * den;
    const Complex D = t.c * num + t.d * den;
    const Complex Nz = t.a * z + t.b;
    const Complex Dz = t.c * z + t.d;
    const Complex fz = z * Dz - Nz;
    check_nonsingular(fz, Dz, "first argument");
    sum += D / (z * D - N) + (num * t.c - den * t.a) / (num * Dz - den * Nz) - (Dz + z * t.c - t.a) / fz;
  }
  return sum;
}

double functional_equation_residual(const PrimeEvaluator& ev, Complex z, Complex y, int j,
                                    const IntegralsFirstKind& v) {
  return functional_equation_residual(ev, ev, z, y, j, v);
}

double functional_equation_residual(const PrimeEvaluator& ev, const PrimeEvaluator& shifted_ev, Complex z, Complex y,
                                    int j, const IntegralsFirstKind& v) {
  if (ev.domain().genus() == 0) return 0.0;
  const auto gens = generators(ev.domain());
  if (j < 1 || j > static_cast<int>(gens.size())) throw DomainError("generator index out of range");
  const MobiusMap& th = gens[static_cast<std::size_t>(j - 1)];
  const Complex tau_jj = v.tau()(j - 1, j - 1);

  const auto shifted = [&](Complex x) {
    const Complex lhs = shifted_ev.omega(th(x), y);
    const Complex w = ev.omega(x, y);
    const Complex pref =
        std::exp(2.0 * kPi * kI * (v.v(j, y) - v.v(j, x)) - kPi * kI * tau_jj) * std::sqrt(th.derivative(x)) * w;
    return std::pair<Complex, Complex>{lhs, pref};
  };

  Complex z0{0.9, 0.0};
  if (!ev.domain().contains(z0, 1e-3)) z0 = z;
  const auto [l0, p0] = shifted(z0);
  const double sign = std::abs(l0 - p0) <= std::abs(l0 + p0) ? 1.0 : -1.0;

  const auto [lhs, pref] = shifted(z);
  const Complex w = ev.omega(z, y);
  return std::abs(lhs - sign * pref) / std::abs(w);
}

std::pair<double, double> symmetry_residuals(const PrimeEvaluator& ev, Complex z, Complex y) {
  const Complex w = ev.omega(z, y);
  const Complex zr = 1.0 / std::conj(z);
  const Complex yr = 1.0 / std::conj(y);
  const double r1 = std::abs(std::conj(w) + std::conj(z) * std::conj(y) * ev.omega(zr, yr));
  const double r2 = std::abs(w + ev.omega(y, z));
  return {r1, r2};
}

}  // namespace circmap
