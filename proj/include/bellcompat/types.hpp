#pragma once

// Domain types shared by the solver, inequality, simulation and analysis code.

#include "bellcompat/rational.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bellcompat {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad caller-supplied data (invalid table, family over the cap, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

inline constexpr double kNormTolerance = 1e-9;
inline constexpr std::size_t kDefaultVariableCap = 20;

enum class Arithmetic { Exact, Float };

struct VariableId {
  std::size_t index = 0;
  std::string label;

  friend bool operator==(const VariableId& a, const VariableId& b) { return a.index == b.index; }
};

enum class Outcome : std::int8_t { Minus = -1, NoClick = 0, Plus = 1 };

inline int sign_of(Outcome o) { return static_cast<int>(o); }
inline Outcome outcome_from_sign(bool plus) { return plus ? Outcome::Plus : Outcome::Minus; }

/// Cell layout of a pairwise table: (++, +-, -+, --).
enum Cell : std::size_t { kPP = 0, kPM = 1, kMP = 2, kMM = 3 };

constexpr std::size_t cell_index(bool first_plus, bool second_plus) {
  return (first_plus ? 0 : 2) + (second_plus ? 0 : 1);
}

/// Joint distribution of one ordered pair of dichotomous variables.
/// Cells are exact rationals; float-mode consumers read them via `as_double`.
class PairwiseTable {
 public:
  PairwiseTable(std::size_t first, std::size_t second, std::array<Rational, 4> cells);
  static PairwiseTable from_doubles(std::size_t first, std::size_t second,
                                    const std::array<double, 4>& cells);

  std::size_t first() const { return first_; }
  std::size_t second() const { return second_; }
  const std::array<Rational, 4>& cells() const { return cells_; }
  const Rational& cell(std::size_t i) const { return cells_[i]; }
  std::array<double, 4> as_double() const;

  /// Same distribution with the roles of the two variables exchanged.
  PairwiseTable transposed() const;

  /// P(first = +1) and P(second = +1).
  Rational first_plus() const { return cells_[kPP] + cells_[kPM]; }
  Rational second_plus() const { return cells_[kPP] + cells_[kMP]; }

 private:
  std::size_t first_;
  std::size_t second_;
  std::array<Rational, 4> cells_;
};

/// Variables 0..n-1 plus pairwise tables over distinct unordered pairs.
struct MarginalFamily {
  std::size_t n = 0;
  std::vector<PairwiseTable> tables;
  std::vector<std::string> labels;  // optional, empty or size n
};

struct Violation {
  std::string invariant;
  std::string detail;
  std::optional<std::pair<std::size_t, std::size_t>> pair;
};

using ValidationReport = std::vector<Violation>;

/// Empty report iff every table and family invariant holds. Exact mode
/// demands exact equalities; float mode allows `tolerance`.
ValidationReport validate_family(const MarginalFamily& family,
                                 Arithmetic mode = Arithmetic::Float,
                                 double tolerance = kNormTolerance);

ValidationReport validate_table(const PairwiseTable& table, Arithmetic mode = Arithmetic::Float,
                                double tolerance = kNormTolerance);

/// p(++) - p(+-) - p(-+) + p(--). Throws InvalidInput on an invalid table.
double correlation_of(const PairwiseTable& table);

/// Signed measure on the 2^n atoms. Atom index = sum of 2^k over the
/// variables k whose outcome is +1.
class SignedJoint {
 public:
  SignedJoint(std::size_t n, std::vector<Rational> weights);

  static SignedJoint point_mass(std::size_t n, std::uint64_t atom);

  std::size_t n() const { return n_; }
  std::size_t atoms() const { return weights_.size(); }
  const std::vector<Rational>& weights() const { return weights_; }
  const Rational& weight(std::uint64_t atom) const { return weights_[atom]; }
  std::vector<double> weights_double() const;

  Rational total() const;
  /// Sum of max(0, -w).
  Rational negativity() const;
  bool nonnegative() const;

  PairwiseTable pair_marginal(std::size_t i, std::size_t j) const;
  /// Family carrying the marginal of every unordered pair.
  MarginalFamily all_pair_marginals() const;
  /// Family carrying marginals for the listed pairs only.
  MarginalFamily marginals_for(const std::vector<std::pair<std::size_t, std::size_t>>& pairs) const;

 private:
  std::size_t n_;
  std::vector<Rational> weights_;
};

std::uint64_t encode_atom(const std::vector<int>& signs);
std::vector<int> decode_atom(std::uint64_t atom, std::size_t n);
inline bool atom_plus(std::uint64_t atom, std::size_t k) { return (atom >> k) & 1U; }

struct CompatibilityVerdict {
  enum class Status { Feasible, Infeasible };
  Status status = Status::Infeasible;
  std::optional<SignedJoint> witness;
  /// Farkas vector y over the constraint rows (see constraint_layout in
  /// marginal_solver.hpp): y.A <= 0 on every atom column and y.b > 0.
  std::optional<std::vector<Rational>> certificate;

  bool feasible() const { return status == Status::Feasible; }
};

/// Per-angle-pair coincidence counts. Angles in radians.
struct CoincidenceRecord {
  double theta1 = 0.0;
  double theta2 = 0.0;
  std::uint64_t n_pp = 0;
  std::uint64_t n_pm = 0;
  std::uint64_t n_mp = 0;
  std::uint64_t n_mm = 0;

  std::uint64_t total() const { return n_pp + n_pm + n_mp + n_mm; }
  std::array<std::uint64_t, 4> counts() const { return {n_pp, n_pm, n_mp, n_mm}; }
  friend bool operator==(const CoincidenceRecord&, const CoincidenceRecord&) = default;
};

double deg_to_rad(double degrees);
double rad_to_deg(double radians);

}  // namespace bellcompat
