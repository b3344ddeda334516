#pragma once

// Two-step averaging over polarization sub-ensembles (u, v) and hidden
// variables lambda, compared against the single joint average it is meant
// to equal. The two agree exactly when F is the (u,v)-marginal of one joint
// P(u,v,lambda) and rho_{u,v} its conditional.

#include <functional>
#include <optional>
#include <vector>

namespace bellcompat {

/// +-1 valued outcome A(a, b, u, v, lambda) or B(...).
using LeggettOutcome = std::function<int(double a, double b, double u, double v, double lambda)>;

struct HiddenGrid {
  std::vector<double> u;
  std::vector<double> v;
  std::vector<double> lambda;

  std::size_t cells() const { return u.size() * v.size(); }
  std::size_t size() const { return cells() * lambda.size(); }
  std::size_t index(std::size_t iu, std::size_t iv, std::size_t il) const {
    return (iu * v.size() + iv) * lambda.size() + il;
  }
};

/// P(u, v, lambda) on a finite grid, row-major in (u, v, lambda).
struct JointWeights {
  HiddenGrid grid;
  std::vector<double> p;
};

struct LeggettModel {
  HiddenGrid grid;
  std::vector<double> f;  // F(u, v), row-major in (u, v)
  /// rho_{u,v}(lambda); nullopt marks a zero-mass (u, v) cell outside the domain.
  std::vector<std::optional<std::vector<double>>> rho;
  LeggettOutcome A;
  LeggettOutcome B;
  double a = 0.0;
  double b = 0.0;
};

/// Throws InvalidInput naming the first broken invariant.
void validate_model(const LeggettModel& model, double tolerance = 1e-9);
void validate_weights(const JointWeights& weights, double tolerance = 1e-9);

/// sum_{u,v} F(u,v) sum_lambda A B rho_{u,v}(lambda).
double leggett_two_step(const LeggettModel& model);

/// sum_{u,v,lambda} A B P(u,v,lambda).
double leggett_joint_average(const JointWeights& weights, const LeggettOutcome& A,
                             const LeggettOutcome& B, double a, double b);

/// F(u,v) = sum_lambda P(u,v,lambda).
std::vector<double> polarization_marginal(const JointWeights& weights);

/// rho(lambda | u, v) = P(u,v,lambda) / F(u,v). Throws InvalidInput naming
/// the cell when F(u,v) = 0.
std::vector<double> conditional_density(const JointWeights& weights, std::size_t iu, std::size_t iv);

/// Model whose F and rho are the marginal and conditionals of `weights`.
/// Zero-mass cells are left out of the domain.
LeggettModel model_from_joint(const JointWeights& weights, LeggettOutcome A, LeggettOutcome B,
                              double a, double b);

/// Hidden-variable distribution that may depend on the settings (a, b).
using SettingDependentWeights = std::function<JointWeights(double a, double b)>;

/// E(AB) at settings (a, b) with the distribution drawn for those settings.
double leggett_correlation(const SettingDependentWeights& weights, const LeggettOutcome& A,
                           const LeggettOutcome& B, double a, double b);

}  // namespace bellcompat
