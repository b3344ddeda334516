#include "bellcompat/leggett.hpp"

#include "bellcompat/types.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace bellcompat {

namespace {

int checked_outcome(const LeggettOutcome& fn, double a, double b, double u, double v, double l) {
  const int value = fn(a, b, u, v, l);
  if (value != 1 && value != -1) {
    throw InvalidInput("Leggett outcome functions must return +1 or -1");
  }
  return value;
}

void require_density(const std::vector<double>& w, double tolerance, const std::string& what) {
  double sum = 0.0;
  for (double x : w) {
    if (!(x >= 0.0)) throw InvalidInput(what + " has a negative entry");
    sum += x;
  }
  if (std::abs(sum - 1.0) > tolerance) {
    std::ostringstream os;
    os << what << " sums to " << sum;
    throw InvalidInput(os.str());
  }
}

std::string cell_name(const HiddenGrid& grid, std::size_t iu, std::size_t iv) {
  std::ostringstream os;
  os << "(u[" << iu << "]=" << grid.u[iu] << ", v[" << iv << "]=" << grid.v[iv] << ")";
  return os.str();
}

}  // namespace

void validate_weights(const JointWeights& weights, double tolerance) {
  if (weights.grid.size() == 0) throw InvalidInput("empty hidden grid");
  if (weights.p.size() != weights.grid.size()) {
    throw InvalidInput("P(u,v,lambda) size does not match the grid");
  }
  require_density(weights.p, tolerance, "P(u,v,lambda)");
}

void validate_model(const LeggettModel& model, double tolerance) {
  const auto& grid = model.grid;
  if (grid.size() == 0) throw InvalidInput("empty hidden grid");
  if (model.f.size() != grid.cells() || model.rho.size() != grid.cells()) {
    throw InvalidInput("F or rho size does not match the (u,v) grid");
  }
  if (!model.A || !model.B) throw InvalidInput("outcome functions A and B are required");
  require_density(model.f, tolerance, "F(u,v)");
  for (std::size_t iu = 0; iu < grid.u.size(); ++iu) {
    for (std::size_t iv = 0; iv < grid.v.size(); ++iv) {
      const std::size_t c = iu * grid.v.size() + iv;
      if (!model.rho[c]) {
        if (model.f[c] > 0.0) {
          throw InvalidInput("rho missing for positive-mass cell " + cell_name(grid, iu, iv));
        }
        continue;
      }
      if (model.rho[c]->size() != grid.lambda.size()) {
        throw InvalidInput("rho size mismatch at cell " + cell_name(grid, iu, iv));
      }
      require_density(*model.rho[c], tolerance, "rho at cell " + cell_name(grid, iu, iv));
    }
  }
}

double leggett_two_step(const LeggettModel& model) {
  validate_model(model);
  const auto& grid = model.grid;
  double total = 0.0;
  for (std::size_t iu = 0; iu < grid.u.size(); ++iu) {
    for (std::size_t iv = 0; iv < grid.v.size(); ++iv) {
      const std::size_t c = iu * grid.v.size() + iv;
      if (!model.rho[c]) continue;
      // Step 1: average over lambda within the (u, v) sub-ensemble.
      double inner = 0.0;
      for (std::size_t il = 0; il < grid.lambda.size(); ++il) {
        const double l = grid.lambda[il];
        inner += checked_outcome(model.A, model.a, model.b, grid.u[iu], grid.v[iv], l) *
                 checked_outcome(model.B, model.a, model.b, grid.u[iu], grid.v[iv], l) *
                 (*model.rho[c])[il];
      }
      // Step 2: average over the sub-ensembles.
      total += inner * model.f[c];
    }
  }
  return total;
}

double leggett_joint_average(const JointWeights& weights, const LeggettOutcome& A,
                             const LeggettOutcome& B, double a, double b) {
  validate_weights(weights);
  if (!A || !B) throw InvalidInput("outcome functions A and B are required");
  const auto& grid = weights.grid;
  double total = 0.0;
  for (std::size_t iu = 0; iu < grid.u.size(); ++iu) {
    for (std::size_t iv = 0; iv < grid.v.size(); ++iv) {
      for (std::size_t il = 0; il < grid.lambda.size(); ++il) {
        const double p = weights.p[grid.index(iu, iv, il)];
        if (p == 0.0) continue;
        const double l = grid.lambda[il];
        total += checked_outcome(A, a, b, grid.u[iu], grid.v[iv], l) *
                 checked_outcome(B, a, b, grid.u[iu], grid.v[iv], l) * p;
      }
    }
  }
  return total;
}

std::vector<double> polarization_marginal(const JointWeights& weights) {
  validate_weights(weights);
  const auto& grid = weights.grid;
  std::vector<double> f(grid.cells(), 0.0);
  for (std::size_t c = 0; c < grid.cells(); ++c) {
    for (std::size_t il = 0; il < grid.lambda.size(); ++il) {
      f[c] += weights.p[c * grid.lambda.size() + il];
    }
  }
  return f;
}

std::vector<double> conditional_density(const JointWeights& weights, std::size_t iu,
                                        std::size_t iv) {
  const auto& grid = weights.grid;
  if (iu >= grid.u.size() || iv >= grid.v.size()) throw InvalidInput("cell index out of range");
  const std::size_t base = grid.index(iu, iv, 0);
  double mass = 0.0;
  for (std::size_t il = 0; il < grid.lambda.size(); ++il) mass += weights.p[base + il];
  if (mass <= 0.0) {
    throw InvalidInput("cannot condition on zero-mass cell " + cell_name(grid, iu, iv));
  }
  std::vector<double> rho(grid.lambda.size());
  for (std::size_t il = 0; il < grid.lambda.size(); ++il) rho[il] = weights.p[base + il] / mass;
  return rho;
}

LeggettModel model_from_joint(const JointWeights& weights, LeggettOutcome A, LeggettOutcome B,
                              double a, double b) {
  LeggettModel model;
  model.grid = weights.grid;
  model.f = polarization_marginal(weights);
  model.rho.resize(weights.grid.cells());
  for (std::size_t iu = 0; iu < weights.grid.u.size(); ++iu) {
    for (std::size_t iv = 0; iv < weights.grid.v.size(); ++iv) {
      const std::size_t c = iu * weights.grid.v.size() + iv;
      if (model.f[c] > 0.0) model.rho[c] = conditional_density(weights, iu, iv);
    }
  }
  model.A = std::move(A);
  model.B = std::move(B);
  model.a = a;
  model.b = b;
  return model;
}

double leggett_correlation(const SettingDependentWeights& weights, const LeggettOutcome& A,
                           const LeggettOutcome& B, double a, double b) {
  return leggett_joint_average(weights(a, b), A, B, a, b);
}

}  // namespace bellcompat
