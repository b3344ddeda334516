// Exact oracle for the compatibility question on at most four variables.
//
// The equality system A w = b is reduced to row echelon form, every solution
// is written as w = w0 + N t over the free columns, and the nonnegativity
// constraints w >= 0 are projected onto t by Fourier-Motzkin elimination.
// No simplex machinery is shared with check_compatibility.

#include "bellcompat/marginal_solver.hpp"

#include <algorithm>
#include <map>

namespace bellcompat {

namespace {

using Row = std::vector<Rational>;

struct Echelon {
  std::vector<Row> reduced;            // R = E A, pivot rows first
  std::vector<Row> transform;          // E
  std::vector<Rational> rhs;           // E b
  std::vector<std::size_t> pivot_col;  // per pivot row
};

Echelon echelon(std::vector<Row> a, std::vector<Rational> b) {
  const std::size_t m = a.size();
  const std::size_t cols = m ? a[0].size() : 0;
  std::vector<Row> e(m, Row(m));
  for (std::size_t i = 0; i < m; ++i) e[i][i] = 1;
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < m; ++c) {
    std::size_t p = r;
    while (p < m && a[p][c] == 0) ++p;
    if (p == m) continue;
    std::swap(a[p], a[r]);
    std::swap(e[p], e[r]);
    std::swap(b[p], b[r]);
    const Rational inv = 1 / a[r][c];
    for (auto& v : a[r]) v *= inv;
    for (auto& v : e[r]) v *= inv;
    b[r] *= inv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r || a[i][c] == 0) continue;
      const Rational f = a[i][c];
      for (std::size_t k = 0; k < cols; ++k) a[i][k] -= f * a[r][k];
      for (std::size_t k = 0; k < m; ++k) e[i][k] -= f * e[r][k];
      b[i] -= f * b[r];
    }
    pivots.push_back(c);
    ++r;
  }
  return {std::move(a), std::move(e), std::move(b), std::move(pivots)};
}

/// coeffs . t + constant >= 0, together with the nonnegative multipliers
/// over the atom inequalities w_j >= 0 that produced it.
struct Inequality {
  Row coeffs;
  Rational constant;
  Row multipliers;
};

void normalize(Inequality& q) {
  Rational scale = 0;
  for (const auto& c : q.coeffs) {
    if (c != 0) {
      scale = abs(c);
      break;
    }
  }
  if (scale == 0) return;
  for (auto& c : q.coeffs) c /= scale;
  q.constant /= scale;
  for (auto& m : q.multipliers) m /= scale;
}

std::vector<Inequality> deduplicate(std::vector<Inequality> in) {
  // Same direction: keep the tightest (smallest constant).
  std::map<std::vector<std::string>, std::size_t> seen;
  std::vector<Inequality> out;
  for (auto& q : in) {
    normalize(q);
    bool trivial = std::all_of(q.coeffs.begin(), q.coeffs.end(), [](const Rational& c) { return c == 0; });
    if (trivial && q.constant >= 0) continue;
    std::vector<std::string> key;
    for (const auto& c : q.coeffs) key.push_back(c.get_str());
    auto it = seen.find(key);
    if (it == seen.end()) {
      seen.emplace(std::move(key), out.size());
      out.push_back(std::move(q));
    } else if (q.constant < out[it->second].constant) {
      out[it->second] = std::move(q);
    }
  }
  return out;
}

std::vector<Rational> certificate_from_multipliers(const Echelon& ech, const Row& lambda) {
  // lambda lies in the row space of A: lambda = sum_i mu_i R_i with
  // mu_i = lambda[pivot_col[i]], so lambda = A^T z with z = sum_i mu_i E_i.
  const std::size_t m = ech.transform.size();
  std::vector<Rational> z(m);
  for (std::size_t i = 0; i < ech.pivot_col.size(); ++i) {
    const Rational& mu = lambda[ech.pivot_col[i]];
    if (mu == 0) continue;
    for (std::size_t k = 0; k < m; ++k) z[k] += mu * ech.transform[i][k];
  }
  for (auto& v : z) v = -v;
  return z;
}

}  // namespace

CompatibilityVerdict brute_force_compatibility(const MarginalFamily& family) {
  if (family.n > 4) throw InvalidInput("brute_force_compatibility supports at most 4 variables");
  SolverOptions options;
  options.arithmetic = Arithmetic::Exact;
  require_solvable(family, options);

  const std::size_t atoms = std::size_t{1} << family.n;
  const std::size_t m = constraint_rows(family);
  std::vector<Row> a(m, Row(atoms));
  for (std::uint64_t atom = 0; atom < atoms; ++atom) {
    for (auto r : atom_rows(family, atom)) a[r][atom] = 1;
  }
  const Echelon ech = echelon(a, constraint_rhs(family));

  CompatibilityVerdict verdict;
  verdict.status = CompatibilityVerdict::Status::Infeasible;

  // Inconsistent equalities: a zero row of R with nonzero right-hand side.
  for (std::size_t i = ech.pivot_col.size(); i < m; ++i) {
    if (ech.rhs[i] != 0) {
      std::vector<Rational> y = ech.transform[i];
      if (ech.rhs[i] < 0) {
        for (auto& v : y) v = -v;
      }
      verdict.certificate = std::move(y);
      return verdict;
    }
  }

  std::vector<bool> is_pivot(atoms, false);
  for (auto c : ech.pivot_col) is_pivot[c] = true;
  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0; c < atoms; ++c) {
    if (!is_pivot[c]) free_cols.push_back(c);
  }
  const std::size_t d = free_cols.size();

  // w_j >= 0 written in the parameters t (one per free column).
  std::vector<Inequality> system;
  for (std::size_t j = 0; j < atoms; ++j) {
    Inequality q{Row(d), 0, Row(atoms)};
    q.multipliers[j] = 1;
    if (is_pivot[j]) {
      const std::size_t i = static_cast<std::size_t>(
          std::find(ech.pivot_col.begin(), ech.pivot_col.end(), j) - ech.pivot_col.begin());
      q.constant = ech.rhs[i];
      for (std::size_t f = 0; f < d; ++f) q.coeffs[f] = -ech.reduced[i][free_cols[f]];
    } else {
      const std::size_t f = static_cast<std::size_t>(
          std::find(free_cols.begin(), free_cols.end(), j) - free_cols.begin());
      q.coeffs[f] = 1;
    }
    system.push_back(std::move(q));
  }

  // stages[v] holds the system before parameter v is eliminated.
  std::vector<std::vector<Inequality>> stages;
  system = deduplicate(std::move(system));
  for (std::size_t v = 0; v < d; ++v) {
    stages.push_back(system);
    std::vector<Inequality> pos, neg, next;
    for (auto& q : system) {
      if (q.coeffs[v] > 0) {
        pos.push_back(q);
      } else if (q.coeffs[v] < 0) {
        neg.push_back(q);
      } else {
        next.push_back(q);
      }
    }
    for (const auto& p : pos) {
      for (const auto& n : neg) {
        const Rational wp = -n.coeffs[v];
        const Rational wn = p.coeffs[v];
        Inequality q{Row(d), wp * p.constant + wn * n.constant, Row(atoms)};
        for (std::size_t k = 0; k < d; ++k) q.coeffs[k] = wp * p.coeffs[k] + wn * n.coeffs[k];
        q.coeffs[v] = 0;
        for (std::size_t k = 0; k < atoms; ++k) {
          q.multipliers[k] = wp * p.multipliers[k] + wn * n.multipliers[k];
        }
        next.push_back(std::move(q));
      }
    }
    system = deduplicate(std::move(next));
  }

  // Every parameter eliminated: what remains are constants.
  for (const auto& q : system) {
    if (q.constant < 0) {
      verdict.certificate = certificate_from_multipliers(ech, q.multipliers);
      return verdict;
    }
  }

  // Back substitution, last eliminated parameter first.
  std::vector<Rational> t(d);
  for (std::size_t v = d; v-- > 0;) {
    std::optional<Rational> lower, upper;
    for (const auto& q : stages[v]) {
      if (q.coeffs[v] == 0) continue;
      Rational rest = q.constant;
      for (std::size_t k = v + 1; k < d; ++k) rest += q.coeffs[k] * t[k];
      const Rational bound = -rest / q.coeffs[v];
      if (q.coeffs[v] > 0) {
        if (!lower || bound > *lower) lower = bound;
      } else if (!upper || bound < *upper) {
        upper = bound;
      }
    }
    t[v] = lower ? *lower : (upper ? *upper : Rational(0));
  }

  std::vector<Rational> w(atoms);
  for (std::size_t f = 0; f < d; ++f) w[free_cols[f]] = t[f];
  for (std::size_t i = 0; i < ech.pivot_col.size(); ++i) {
    Rational value = ech.rhs[i];
    for (std::size_t f = 0; f < d; ++f) value -= ech.reduced[i][free_cols[f]] * t[f];
    w[ech.pivot_col[i]] = value;
  }
  verdict.status = CompatibilityVerdict::Status::Feasible;
  verdict.witness = SignedJoint(family.n, std::move(w));
  return verdict;
}

}  // namespace bellcompat
