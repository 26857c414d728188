#pragma once

#include <utility>
#include <vector>

#include "circmap/domain.hpp"
#include "circmap/schottky.hpp"

namespace circmap {

class IntegralsFirstKind;

/// Truncated Schottky-Klein product over the half-set Theta' of the word ball.
class PrimeEvaluator {
 public:
  /// word_length < 0 picks the length adaptively (see choose_word_length).
  explicit PrimeEvaluator(CircularDomain d, int word_length = -1, bool mirrored = false);
  PrimeEvaluator(CircularDomain d, WordEnumeration e, bool mirrored = false);

  const CircularDomain& domain() const { return domain_; }
  const WordEnumeration& enumeration() const { return enumeration_; }
  int word_length() const { return enumeration_.max_length; }
  const std::vector<MobiusMap>& half_set() const { return half_set_; }
  /// Realizations of all enumerated words (identity first).
  const std::vector<MobiusMap>& all_words() const { return all_words_; }
  bool tail_converged() const { return tail_converged_; }
  double tail() const { return tail_; }

  Complex omega(Complex z, Complex y) const;

  /// den * omega(z, num / den); with den = 0 this is the limit at y = infinity.
  Complex omega_projective(Complex z, Complex num, Complex den) const;

  /// d/dz log omega(z, y).
  Complex omega_log_derivative(Complex z, Complex y) const;
  Complex omega_log_derivative_projective(Complex z, Complex num, Complex den) const;

 private:
  void build(bool mirrored);

  CircularDomain domain_;
  WordEnumeration enumeration_;
  std::vector<MobiusMap> all_words_;
  std::vector<MobiusMap> half_set_;
  double tail_ = 0.0;
  bool tail_converged_ = true;
};

/// |omega(theta_j z, y) - exp(2 pi i (v_j(y) - v_j(z)) - pi i tau_jj) sqrt(theta_j'(z)) omega(z, y)| / |omega(z, y)|,
/// square-root sign calibrated once at z0 = 0.9.
double functional_equation_residual(const PrimeEvaluator& ev, Complex z, Complex y, int j,
                                    const IntegralsFirstKind& v);
/// Same, with omega(theta_j z, y) taken from `shifted_ev`. theta_j z lies outside Omega, one letter
/// deeper in the group, so an evaluator with word length L + 1 there matches ev on Omega.
double functional_equation_residual(const PrimeEvaluator& ev, const PrimeEvaluator& shifted_ev, Complex z, Complex y,
                                    int j, const IntegralsFirstKind& v);

/// (|conj w(z,y) + conj(z y) w(1/conj z, 1/conj y)|, |w(z,y) + w(y,z)|).
std::pair<double, double> symmetry_residuals(const PrimeEvaluator& ev, Complex z, Complex y);

}  // namespace circmap
