#pragma once

// Coincidence-count data: CSV ingestion, empirical tables, the anomaly
// compensation analysis and inequalities assembled across contexts.

#include "bellcompat/inequalities.hpp"
#include "bellcompat/types.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace bellcompat {

inline constexpr const char* kCoincidenceHeader = "theta1_deg,theta2_deg,n_pp,n_pm,n_mp,n_mm";
inline constexpr double kDefaultSigmaK = 5.0;

/// Input rejected at a specific line (1-based) of a text source.
class ParseError : public InvalidInput {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what);
  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

/// One record per data row, angles converted to radians. Blank lines are
/// skipped. `source` names the input in error messages.
std::vector<CoincidenceRecord> parse_coincidence_csv(std::istream& in,
                                                     const std::string& source = "<input>");
std::vector<CoincidenceRecord> parse_coincidence_csv(const std::filesystem::path& path);

/// Header plus one row per record, angles in degrees to 12 significant digits.
void write_coincidence_csv(std::ostream& out, const std::vector<CoincidenceRecord>& records);

struct EmpiricalTable {
  PairwiseTable table;              // exact n_xy / N
  std::array<double, 4> p{};        // n_xy / N as doubles
  std::array<double, 4> se{};       // sqrt(p (1 - p) / N)
  double correlation = 0.0;         // p++ - p+- - p-+ + p--
  double correlation_se = 0.0;      // sqrt((1 - E^2) / N)
  std::uint64_t total = 0;
};

/// Throws InvalidInput on a zero-total record.
EmpiricalTable empirical_table(const CoincidenceRecord& record);

// ---- anomaly compensation -------------------------------------------------

struct AnomalyOptions {
  /// Linear combinations sum_xy c_xy delta_xy to evaluate, in cell order.
  std::vector<std::array<double, 4>> combinations;
  double tolerance = 1e-12;
  double sigma_k = kDefaultSigmaK;
};

struct CombinationResult {
  std::array<double, 4> coefficients{};
  double experimental = 0.0;  // sum c_xy P^exp
  double predicted = 0.0;     // sum c_xy P^QM
  double deviation = 0.0;     // sum c_xy delta_xy
};

struct AnomalyReport {
  double theta1 = 0.0;
  double theta2 = 0.0;
  std::array<double, 4> predicted{};   // singlet P^QM
  std::array<double, 4> observed{};    // frequencies
  std::array<double, 4> deviation{};   // delta_xy = P^exp - P^QM
  double delta_e = 0.0;                // E^exp - cos 2(theta1 - theta2)
  double compensation_residual = 0.0;  // d++ - d+- - d-+ + d--
  /// Deviations of P(a=+1) and P(b=+1) from the predicted 1/2.
  std::array<double, 2> marginal_deviation{};
  std::array<double, 2> marginal_se{};
  /// Some single-station marginal moved beyond max(tolerance, sigma_k * se):
  /// the cell deviations do not merely reshuffle weight within E.
  bool flagged = false;
  std::vector<CombinationResult> combinations;
};

/// One report per record against the singlet predictions at its angles.
std::vector<AnomalyReport> anomaly_analysis(const std::vector<CoincidenceRecord>& records,
                                            const AnomalyOptions& options = {});

// ---- cross-context evaluation --------------------------------------------

enum class CrossInequality { Bell, Wigner, Chsh };

CrossInequality parse_cross_inequality(const std::string& name);
std::string to_string(CrossInequality inequality);

/// Number of settings an inequality is written in (3 or 4).
std::size_t setting_count(CrossInequality inequality);

/// Estimate entering the inequality and the single context it came from.
struct ContextEstimate {
  std::string quantity;       // e.g. "E(a,b)" or "P(b=-,c=+)"
  std::size_t context = 0;    // index into CrossContextEvaluation::contexts
  bool transposed = false;    // record stored the pair in the opposite order
  double value = 0.0;
  double se = 0.0;
};

struct CrossContextEvaluation {
  CrossInequality inequality = CrossInequality::Bell;
  std::vector<double> settings;              // radians, named a, b, c or a, a', b, b'
  std::vector<CoincidenceRecord> contexts;   // in the inequality's context order
  std::vector<ContextEstimate> estimates;
  InequalityReport report;
  double sigma = 0.0;  // propagated standard error of the margin
  double sigma_k = kDefaultSigmaK;
  /// margin > sigma_k * sigma.
  bool violated = false;
};

/// Context pairs an inequality needs, as indices into its settings:
/// Bell (a,b), (c,b), (a,c); Wigner (a,b), (b,c), (a,c);
/// CHSH (a,b), (a,b'), (a',b), (a',b') with settings (a, a', b, b').
std::vector<std::pair<std::size_t, std::size_t>> required_contexts(CrossInequality inequality);

/// Records are taken in required_contexts order. Throws InvalidInput when a
/// context is missing, extra records are given, or the angle labels of the
/// records do not name one consistent assignment of settings.
CrossContextEvaluation evaluate_cross_context(const std::vector<CoincidenceRecord>& records,
                                              CrossInequality inequality,
                                              double sigma_k = kDefaultSigmaK);

/// Selects, for each required context, the one record whose angles match
/// that settings pair (in either order), then evaluates. Throws InvalidInput
/// when a context has no record or more than one.
CrossContextEvaluation evaluate_cross_context(const std::vector<CoincidenceRecord>& records,
                                              CrossInequality inequality,
                                              const std::vector<double>& settings,
                                              double sigma_k = kDefaultSigmaK);

}  // namespace bellcompat
