#pragma once

// Compatibility of pairwise marginals: does one joint distribution over the
// 2^n atoms reproduce every table of a MarginalFamily?
//
// Constraint layout shared by the solver, the oracle and certificates:
//   row 0                 sum of all atom weights = 1
//   row 1 + 4*t + cell    sum of atoms falling in `cell` of table t
//                         = that table's cell probability
// An atom column therefore carries a 1 in row 0 and one 1 per table.

#include "bellcompat/types.hpp"

#include <optional>
#include <vector>

namespace bellcompat {

struct SolverOptions {
  /// Unset: exact arithmetic up to `exact_limit` variables, float above.
  std::optional<Arithmetic> arithmetic;
  std::size_t variable_cap = kDefaultVariableCap;
  std::size_t exact_limit = 12;
  double tolerance = kNormTolerance;

  Arithmetic resolve(std::size_t n) const {
    if (arithmetic) return *arithmetic;
    return n <= exact_limit ? Arithmetic::Exact : Arithmetic::Float;
  }
};

struct QuasiSolution {
  SignedJoint joint;
  Rational negativity;  // sum over atoms of max(0, -w)
};

std::size_t constraint_rows(const MarginalFamily& family);
std::vector<Rational> constraint_rhs(const MarginalFamily& family);
/// Row indices holding a 1 in the column of `atom`.
std::vector<std::size_t> atom_rows(const MarginalFamily& family, std::uint64_t atom);

/// Throws InvalidInput when the family fails validation or exceeds the cap.
void require_solvable(const MarginalFamily& family, const SolverOptions& options);

CompatibilityVerdict check_compatibility(const MarginalFamily& family,
                                         const SolverOptions& options = {});

/// Minimal-negativity signed joint reproducing every table. Ties are broken
/// toward the lexicographically smallest weight vector in atom order.
QuasiSolution solve_quasi(const MarginalFamily& family, const SolverOptions& options = {});

/// Independent oracle for n <= 4: exact Gaussian elimination of the equality
/// system followed by Fourier-Motzkin elimination of the free parameters.
CompatibilityVerdict brute_force_compatibility(const MarginalFamily& family);

/// If `certificate` is a valid Farkas vector for the family (y.A <= 0 on
/// every atom column, y.b > 0) returns y.b, otherwise nullopt. `slack`
/// admits y.A up to that value for certificates computed in floating point.
std::optional<Rational> certificate_gap(const MarginalFamily& family,
                                        const std::vector<Rational>& certificate,
                                        double slack = 0.0);

/// Lower bound on min over w >= 0 of ||A w - b||_1 implied by a certificate:
/// y.b / max|y_i|. Nullopt when the certificate is not valid.
std::optional<Rational> infeasibility_lower_bound(const MarginalFamily& family,
                                                  const std::vector<Rational>& certificate);

/// Whether the pair marginals of `joint` reproduce every table (exactly, or
/// within `tolerance` in float mode).
bool reproduces(const MarginalFamily& family, const SignedJoint& joint, Arithmetic mode,
                double tolerance = kNormTolerance);

}  // namespace bellcompat
