#pragma once

#include <string>

namespace bellcompat {

inline constexpr double kInequalityTolerance = 1e-12;

/// Every report is oriented so that `violated` holds iff lhs > rhs + tol,
/// i.e. iff margin = lhs - rhs is (sufficiently) positive. Inputs may leave
/// their range by at most tol; further out they are rejected as InvalidInput.
struct InequalityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool violated = false;
  double margin = 0.0;
};

/// |<a,b> - <c,b>| <= 1 - <a,c> for +-1 variables on one probability space.
InequalityReport bell_covariance(double e_ab, double e_cb, double e_ac,
                                 double tolerance = kInequalityTolerance);

/// P(a=+,b=+) + P(b=-,c=+) >= P(a=+,c=+). The report stores
/// lhs = P(a=+,c=+) and rhs = P(a=+,b=+) + P(b=-,c=+).
InequalityReport wigner(double p_ab_pp, double p_bc_mp, double p_ac_pp,
                        double tolerance = kInequalityTolerance);

/// |E(a,b) + E(a,b') + E(a',b) - E(a',b')| <= 2.
InequalityReport chsh(double e_ab, double e_abp, double e_apb, double e_apbp,
                      double tolerance = kInequalityTolerance);

}  // namespace bellcompat
