#pragma once

// Quantum predictions for the EPR-Bohm singlet experiment in the
// perfect-correlation convention: E(theta, theta) = +1,
// P(++) = P(--) = cos^2(d)/2 and P(+-) = P(-+) = sin^2(d)/2, d = theta1 - theta2.

#include "bellcompat/types.hpp"

#include <vector>

namespace bellcompat {

/// Distinct analyzer settings in radians.
class AngleSet {
 public:
  /// Throws InvalidInput for fewer than two angles or two settings equal modulo pi.
  explicit AngleSet(std::vector<double> radians);
  static AngleSet from_degrees(const std::vector<double>& degrees);

  const std::vector<double>& angles() const { return angles_; }
  std::size_t size() const { return angles_.size(); }
  double operator[](std::size_t i) const { return angles_[i]; }

 private:
  std::vector<double> angles_;
};

enum class FamilyMode {
  AllPairs,
  /// Four angles (a, a', b, b'): only the cross-station pairs
  /// (a,b), (a,b'), (a',b), (a',b').
  Chsh,
};

/// Table for variables (first, second). Cells are exact rationals snapped to
/// within 1e-15 of the formula; P(++) + P(+-) = 1/2 holds exactly.
PairwiseTable singlet_pair_table(double theta1, double theta2, std::size_t first = 0,
                                 std::size_t second = 1);

/// cos 2(theta1 - theta2).
double singlet_correlation(double theta1, double theta2);

MarginalFamily singlet_family(const AngleSet& angles, FamilyMode mode = FamilyMode::AllPairs);

}  // namespace bellcompat
