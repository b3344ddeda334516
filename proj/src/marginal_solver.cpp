#include "bellcompat/marginal_solver.hpp"

#include "bellcompat/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bellcompat {

std::size_t constraint_rows(const MarginalFamily& family) { return 1 + 4 * family.tables.size(); }

std::vector<Rational> constraint_rhs(const MarginalFamily& family) {
  std::vector<Rational> b(constraint_rows(family));
  b[0] = 1;
  for (std::size_t t = 0; t < family.tables.size(); ++t) {
    for (std::size_t c = 0; c < 4; ++c) b[1 + 4 * t + c] = family.tables[t].cell(c);
  }
  return b;
}

std::vector<std::size_t> atom_rows(const MarginalFamily& family, std::uint64_t atom) {
  std::vector<std::size_t> rows;
  rows.reserve(1 + family.tables.size());
  rows.push_back(0);
  for (std::size_t t = 0; t < family.tables.size(); ++t) {
    const auto& table = family.tables[t];
    rows.push_back(1 + 4 * t +
                   cell_index(atom_plus(atom, table.first()), atom_plus(atom, table.second())));
  }
  return rows;
}

void require_solvable(const MarginalFamily& family, const SolverOptions& options) {
  if (family.n > options.variable_cap) {
    std::ostringstream os;
    os << "family has " << family.n << " variables; cap is " << options.variable_cap;
    throw InvalidInput(os.str());
  }
  if (family.n == 0) throw InvalidInput("family has no variables");
  const auto report = validate_family(family, options.resolve(family.n), options.tolerance);
  if (!report.empty()) {
    std::ostringstream os;
    os << "invalid family:";
    for (const auto& v : report) os << " [" << v.invariant << "] " << v.detail << ";";
    throw InvalidInput(os.str());
  }
}

bool reproduces(const MarginalFamily& family, const SignedJoint& joint, Arithmetic mode,
                double tolerance) {
  if (joint.n() != family.n) return false;
  if (mode == Arithmetic::Exact) {
    if (joint.total() != 1) return false;
  } else if (std::abs(joint.total().get_d() - 1.0) > tolerance) {
    return false;
  }
  for (const auto& table : family.tables) {
    const auto got = joint.pair_marginal(table.first(), table.second());
    for (std::size_t c = 0; c < 4; ++c) {
      if (mode == Arithmetic::Exact) {
        if (got.cell(c) != table.cell(c)) return false;
      } else if (std::abs(got.cell(c).get_d() - table.cell(c).get_d()) > tolerance) {
        return false;
      }
    }
  }
  return true;
}

std::optional<Rational> certificate_gap(const MarginalFamily& family,
                                        const std::vector<Rational>& certificate, double slack) {
  if (certificate.size() != constraint_rows(family)) return std::nullopt;
  const std::uint64_t atoms = std::uint64_t{1} << family.n;
  for (std::uint64_t atom = 0; atom < atoms; ++atom) {
    Rational dot = 0;
    for (auto row : atom_rows(family, atom)) dot += certificate[row];
    if (dot > Rational(slack)) return std::nullopt;
  }
  const auto b = constraint_rhs(family);
  Rational gap = 0;
  for (std::size_t i = 0; i < b.size(); ++i) gap += certificate[i] * b[i];
  if (gap <= 0) return std::nullopt;
  return gap;
}

std::optional<Rational> infeasibility_lower_bound(const MarginalFamily& family,
                                                  const std::vector<Rational>& certificate) {
  auto gap = certificate_gap(family, certificate);
  if (!gap) return std::nullopt;
  Rational scale = 0;
  for (const auto& y : certificate) scale = std::max(scale, Rational(abs(y)));
  return Rational(*gap / scale);
}

namespace {

template <class T>
T from_rational(const Rational& q) {
  if constexpr (std::is_same_v<T, double>) {
    return q.get_d();
  } else {
    return q;
  }
}

// Float-mode values within `eps` of zero are pivoting residue.
template <class T>
Rational to_rational(const T& v, double eps = 0.0) {
  if constexpr (std::is_same_v<T, double>) {
    if (std::abs(v) <= eps) return Rational(0);
  }
  return Rational(v);
}

template <class T>
std::vector<T> rhs_as(const MarginalFamily& family) {
  std::vector<T> out;
  for (const auto& q : constraint_rhs(family)) out.push_back(from_rational<T>(q));
  return out;
}

/// Product of single-variable marginals; variables outside every table sit
/// at +1. Returned only if it reproduces the family.
std::optional<SignedJoint> independent_witness(const MarginalFamily& family, Arithmetic mode,
                                               double tolerance) {
  std::vector<Rational> plus(family.n, Rational(1));
  for (const auto& table : family.tables) {
    plus[table.first()] = table.first_plus();
    plus[table.second()] = table.second_plus();
  }
  const std::uint64_t atoms = std::uint64_t{1} << family.n;
  std::vector<Rational> w(atoms);
  for (std::uint64_t atom = 0; atom < atoms; ++atom) {
    Rational p = 1;
    for (std::size_t k = 0; k < family.n && p != 0; ++k) {
      p *= atom_plus(atom, k) ? plus[k] : Rational(1 - plus[k]);
    }
    w[atom] = p;
  }
  SignedJoint joint(family.n, std::move(w));
  if (!joint.nonnegative() || !reproduces(family, joint, mode, tolerance)) return std::nullopt;
  return joint;
}

CompatibilityVerdict solve_feasibility_exact(const MarginalFamily& family) {
  const std::size_t atoms = std::size_t{1} << family.n;
  std::vector<std::size_t> row_buffer;
  auto column = [&family, &row_buffer](std::size_t j, auto& out) {
    row_buffer = atom_rows(family, j);
    for (auto r : row_buffer) out.emplace_back(r, Rational(1));
  };
  RevisedSimplex<Rational> lp(constraint_rows(family), atoms, column, constraint_rhs(family));
  auto phase = lp.phase_one();
  CompatibilityVerdict verdict;
  if (phase.feasible) {
    verdict.status = CompatibilityVerdict::Status::Feasible;
    verdict.witness = SignedJoint(family.n, lp.primal());
  } else {
    verdict.status = CompatibilityVerdict::Status::Infeasible;
    verdict.certificate = std::move(phase.duals);
  }
  return verdict;
}

// Float mode asks for w >= 0 with |A w - b| <= tol row by row, where tol is
// half the reporting tolerance so that pivoting residue in the witness stays
// inside it:
//   A_i w + s_i = b_i + tol          (upper rows, i < m)
//   A_i w - r_i = b_i - tol          (lower rows; negated when b_i < tol)
// The phase-one duals (u on upper rows, l on lower rows, unnegated) satisfy
// u <= 0 <= l, (u + l).A <= 0 and (u + l).b > tol * sum|u + l| parts, so
// u + l is a Farkas vector for the exact system as well.
CompatibilityVerdict solve_feasibility_float(const MarginalFamily& family, double tolerance) {
  const double tol = 0.5 * tolerance;
  const std::size_t atoms = std::size_t{1} << family.n;
  const std::size_t m = constraint_rows(family);
  const auto b_exact = constraint_rhs(family);
  std::vector<double> b(m);
  for (std::size_t i = 0; i < m; ++i) b[i] = b_exact[i].get_d();
  std::vector<bool> flipped(m);
  std::vector<double> rhs(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    rhs[i] = b[i] + tol;
    flipped[i] = b[i] - tol < 0.0;
    rhs[m + i] = flipped[i] ? tol - b[i] : b[i] - tol;
  }
  std::vector<std::size_t> row_buffer;
  auto column = [&](std::size_t j, auto& out) {
    if (j < atoms) {
      row_buffer = atom_rows(family, j);
      for (auto r : row_buffer) {
        out.emplace_back(r, 1.0);
        out.emplace_back(m + r, flipped[r] ? -1.0 : 1.0);
      }
    } else if (j < atoms + m) {
      out.emplace_back(j - atoms, 1.0);
    } else {
      const std::size_t r = j - atoms - m;
      out.emplace_back(m + r, flipped[r] ? 1.0 : -1.0);
    }
  };
  const double eps = tolerance * 1e-3;
  RevisedSimplex<double> lp(2 * m, atoms + 2 * m, column, rhs, eps);
  auto phase = lp.phase_one(eps);
  CompatibilityVerdict verdict;
  if (phase.feasible) {
    verdict.status = CompatibilityVerdict::Status::Feasible;
    const auto x = lp.primal();
    std::vector<Rational> w;
    w.reserve(atoms);
    for (std::size_t j = 0; j < atoms; ++j) w.push_back(to_rational(x[j], eps));
    verdict.witness = SignedJoint(family.n, std::move(w));
  } else {
    verdict.status = CompatibilityVerdict::Status::Infeasible;
    std::vector<Rational> y(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double lower = flipped[i] ? -phase.duals[m + i] : phase.duals[m + i];
      y[i] = Rational(phase.duals[i] + lower);
    }
    verdict.certificate = std::move(y);
  }
  return verdict;
}

template <class T>
QuasiSolution solve_signed(const MarginalFamily& family, double eps, double tolerance) {
  const std::size_t atoms = std::size_t{1} << family.n;
  const std::size_t rows = constraint_rows(family);
  // Columns [0, atoms) carry the positive parts, [atoms, 2 atoms) the negative parts.
  std::vector<std::size_t> row_buffer;
  auto column = [&family, &row_buffer, atoms](std::size_t j, auto& out) {
    const bool negative_part = j >= atoms;
    row_buffer = atom_rows(family, negative_part ? j - atoms : j);
    for (auto r : row_buffer) out.emplace_back(r, negative_part ? T(-1) : T(1));
  };
  RevisedSimplex<T> lp(rows, 2 * atoms, column, rhs_as<T>(family), eps);
  if (!lp.phase_one(tolerance).feasible) {
    throw InvalidInput("no signed measure reproduces the family (inconsistent single marginals)");
  }

  std::vector<T> cost(2 * atoms, T(0));
  for (std::size_t k = atoms; k < 2 * atoms; ++k) cost[k] = T(1);
  if (lp.optimize(cost) != RevisedSimplex<T>::Status::Optimal) {
    throw Error("solve_quasi: negativity objective unbounded");
  }
  std::size_t free_columns = lp.restrict_to_optimal_face(cost);

  // Lexicographic tie-break: minimize w_0, then w_1, ... over the optimal face.
  std::fill(cost.begin(), cost.end(), T(0));
  for (std::size_t k = 0; k < atoms && free_columns > 0; ++k) {
    cost[k] = T(1);
    cost[atoms + k] = T(-1);
    if (lp.optimize(cost) != RevisedSimplex<T>::Status::Optimal) {
      throw Error("solve_quasi: tie-break objective unbounded");
    }
    free_columns = lp.restrict_to_optimal_face(cost);
    cost[k] = T(0);
    cost[atoms + k] = T(0);
  }

  const auto x = lp.primal();
  std::vector<Rational> w(atoms);
  for (std::size_t k = 0; k < atoms; ++k) w[k] = to_rational(x[k], eps) - to_rational(x[atoms + k], eps);
  SignedJoint joint(family.n, std::move(w));
  Rational negativity = joint.negativity();
  return {std::move(joint), std::move(negativity)};
}

}  // namespace

CompatibilityVerdict check_compatibility(const MarginalFamily& family,
                                         const SolverOptions& options) {
  require_solvable(family, options);
  const Arithmetic mode = options.resolve(family.n);
  if (family.tables.empty()) {
    CompatibilityVerdict verdict;
    verdict.status = CompatibilityVerdict::Status::Feasible;
    verdict.witness = SignedJoint::point_mass(family.n, (std::uint64_t{1} << family.n) - 1);
    return verdict;
  }
  if (family.n <= options.exact_limit) {
    if (auto joint = independent_witness(family, mode, options.tolerance)) {
      CompatibilityVerdict verdict;
      verdict.status = CompatibilityVerdict::Status::Feasible;
      verdict.witness = std::move(joint);
      return verdict;
    }
  }
  if (mode == Arithmetic::Exact) return solve_feasibility_exact(family);
  return solve_feasibility_float(family, options.tolerance);
}

QuasiSolution solve_quasi(const MarginalFamily& family, const SolverOptions& options) {
  require_solvable(family, options);
  if (options.resolve(family.n) == Arithmetic::Exact) {
    return solve_signed<Rational>(family, 0.0, 0.0);
  }
  return solve_signed<double>(family, options.tolerance * 1e-3, options.tolerance);
}

}  // namespace bellcompat
