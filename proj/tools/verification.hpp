#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "circmap/caratheodory.hpp"

namespace circmap::verify {

/// Closed-form references the checks compare against.
struct Oracles {
  /// Annulus r < |z| < 1 map with the given zeros and |prod| = r^d, normalized to 1 at z = 1.
  std::function<Complex(double, const std::vector<Complex>&, int, Complex)> wang_yin;
  /// Finite Blaschke product normalized to 1 at z = 1.
  std::function<Complex(const std::vector<Complex>&, Complex)> blaschke;
};

/// The library's own closed forms (used by the CLI).
Oracles library_oracles();

struct Check {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct Criterion {
  int id = 0;
  std::string title;
  bool soft = false;
  std::vector<Check> checks;
  std::vector<std::string> notes;
  double seconds = 0.0;

  bool passed() const;
};

Criterion disk_degeneration(const Oracles& o);
Criterion annulus_oracle(const Oracles& o);
Criterion cross_formula();
Criterion boundary_behavior(std::uint64_t seed);
Criterion boundary_data();
Criterion semigroup(const Oracles& o, std::uint64_t seed);

struct WitnessRun {
  Criterion criterion;
  Witness witness;
};

/// Witness search on the shrinking-circle family plus the annulus negative control.
WitnessRun reproduction(const WitnessOptions& opts, int control_resolution);

/// Criteria of a named suite: disk, annulus, triply or witness.
std::vector<Criterion> run_suite(const std::string& suite, const Oracles& o, std::uint64_t seed,
                                 const WitnessOptions& witness = {});

/// Fixed-width table of all checks.
std::string format_table(const std::vector<Criterion>& criteria);

}  // namespace circmap::verify
