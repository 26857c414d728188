#pragma once

#include <cstddef>
#include <vector>

#include "circmap/domain.hpp"

namespace circmap {

/// Reduced word over the generators; letter k > 0 is theta_k, -k is its inverse.
using GroupWord = std::vector<int>;

struct WordEnumeration {
  int genus = 0;
  int max_length = 0;
  std::vector<GroupWord> words;
  /// Marks the half-set Theta': w is marked iff it precedes its inverse.
  std::vector<bool> half_set_mask;

  std::size_t size() const { return words.size(); }
};

/// theta_j(z) = q_j + r_j^2 z / (1 - conj(q_j) z), j = 1..g.
std::vector<MobiusMap> generators(const CircularDomain& d);

/// Closed-form size of the ball of radius L in the free group on g letters.
std::size_t word_count(int g, int L);

/// Word cap: 200000 unless SCHOTTKY_MAX_WORDS is set.
std::size_t max_words();

/// Length-major, then lexicographic with 1 < -1 < 2 < -2 < ...
WordEnumeration enumerate_words(int g, int L, std::size_t cap = max_words());

bool is_reduced(const GroupWord& w);
GroupWord inverse_word(const GroupWord& w);

/// Left-to-right composition: [a, b] realizes theta_a o theta_b.
MobiusMap realize(const CircularDomain& d, const GroupWord& w);

/// Realizations of every enumerated word, in enumeration order.
std::vector<MobiusMap> realize_all(const CircularDomain& d, const WordEnumeration& e);

/// Diameter of the image circle of c.
double image_diameter(const MobiusMap& m, const Circle& c);
/// Diameter of the image of the closed domain (infinite if it contains the pole).
double image_diameter(const MobiusMap& m, const CircularDomain& d);

/// Max over words w of length exactly L of min(diam w(closure), diam w^-1(closure)).
double tail_estimate(const CircularDomain& d, int L);

struct WordLengthChoice {
  int length = 0;
  double tail = 0.0;
  bool converged = true;
};

/// Smallest L <= max_length with tail_estimate < tol (and within the word cap);
/// otherwise the largest admissible L with converged = false.
WordLengthChoice choose_word_length(const CircularDomain& d, double tol = 1e-10, int max_length = 8);

}  // namespace circmap
