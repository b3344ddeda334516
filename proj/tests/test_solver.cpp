#include "bellcompat/marginal_solver.hpp"
#include "bellcompat/singlet.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace bellcompat;
using testing::frac;

namespace {

SolverOptions exact() {
  SolverOptions o;
  o.arithmetic = Arithmetic::Exact;
  return o;
}

SolverOptions floating() {
  SolverOptions o;
  o.arithmetic = Arithmetic::Float;
  return o;
}

void require_valid_certificate(const MarginalFamily& f, const CompatibilityVerdict& v,
                               double slack = 0.0) {
  REQUIRE(v.certificate.has_value());
  const auto gap = certificate_gap(f, *v.certificate, slack);
  REQUIRE(gap.has_value());
  CHECK(*gap > 0);
}

/// Random n = 3 family: uniform-ish single marginals, pair correlations drawn
/// anywhere that keeps each table nonnegative. Feasible and infeasible cases both occur.
MarginalFamily random_family(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> md(-4, 4);
  std::array<Rational, 3> m;
  for (auto& x : m) x = frac(md(rng), 8);
  MarginalFamily f;
  f.n = 3;
  for (auto [i, j] : {std::pair<std::size_t, std::size_t>{0, 1}, {0, 2}, {1, 2}}) {
    const Rational lo = std::max(Rational(-1 - m[i] - m[j]), Rational(-1 + m[i] + m[j]));
    const Rational hi = std::min(Rational(1 + m[i] - m[j]), Rational(1 - m[i] + m[j]));
    std::uniform_int_distribution<long> kd(0, 16);
    const Rational mij = lo + (hi - lo) * frac(kd(rng), 16);
    f.tables.emplace_back(i, j,
                          std::array<Rational, 4>{(1 + m[i] + m[j] + mij) / 4,
                                                  (1 + m[i] - m[j] - mij) / 4,
                                                  (1 - m[i] + m[j] - mij) / 4,
                                                  (1 - m[i] - m[j] + mij) / 4});
  }
  return f;
}

}  // namespace

TEST_CASE("grid oracle: incompatible triple negativity is 1/2") {
  // Moment expansion: m_i = 0, <a1,a2> = 1, <a1,a3> = 1, <a2,a3> = -1.
  const Rational oracle = testing::grid_min_negativity({0, 0, 0}, {1, 1, -1});
  CHECK(oracle == frac(1, 2));
  const auto q = solve_quasi(testing::incompatible_triple(), exact());
  CHECK(q.negativity == oracle);
  CHECK(q.joint.negativity() == q.negativity);
  CHECK(reproduces(testing::incompatible_triple(), q.joint, Arithmetic::Exact));
}

TEST_CASE("grid oracle: singlet (0,60,30) negativity is 1/8") {
  // <a,b> = cos 120 = -1/2, <a,c> = cos 60 = 1/2, <b,c> = cos 60 = 1/2.
  const Rational oracle = testing::grid_min_negativity({0, 0, 0}, {frac(-1, 2), frac(1, 2), frac(1, 2)});
  CHECK(oracle == frac(1, 8));
  const auto family = singlet_family(AngleSet::from_degrees({0, 60, 30}));
  const auto q = solve_quasi(family, exact());
  CHECK(q.negativity == oracle);
  const auto qf = solve_quasi(family, floating());
  CHECK(to_double(qf.negativity) == doctest::Approx(0.125).epsilon(1e-9));
}

TEST_CASE("incompatible triple is rejected by both oracles") {
  const auto f = testing::incompatible_triple();
  const auto v = check_compatibility(f, exact());
  CHECK_FALSE(v.feasible());
  CHECK_FALSE(v.witness.has_value());
  require_valid_certificate(f, v);
  const auto b = brute_force_compatibility(f);
  CHECK_FALSE(b.feasible());
  require_valid_certificate(f, b);
  const auto vf = check_compatibility(f, floating());
  CHECK_FALSE(vf.feasible());
  require_valid_certificate(f, vf, 1e-9);
  REQUIRE(infeasibility_lower_bound(f, *v.certificate).has_value());
  CHECK(*infeasibility_lower_bound(f, *v.certificate) > 0);
}

TEST_CASE("uniform tables have the uniform witness") {
  const Rational q = frac(1, 4);
  MarginalFamily f;
  f.n = 3;
  f.tables = {PairwiseTable(0, 1, {q, q, q, q}), PairwiseTable(0, 2, {q, q, q, q}),
              PairwiseTable(1, 2, {q, q, q, q})};
  const auto v = check_compatibility(f, exact());
  REQUIRE(v.feasible());
  REQUIRE(v.witness.has_value());
  for (const auto& w : v.witness->weights()) CHECK(w == frac(1, 8));
  CHECK(brute_force_compatibility(f).feasible());
}

TEST_CASE("singlet families") {
  SUBCASE("(0,60,30) is incompatible") {
    const auto f = singlet_family(AngleSet::from_degrees({0, 60, 30}));
    CHECK_FALSE(check_compatibility(f, exact()).feasible());
    CHECK_FALSE(check_compatibility(f, floating()).feasible());
    CHECK_FALSE(brute_force_compatibility(f).feasible());
  }
  SUBCASE("(0,0.001,0.002): float within tolerance, exact detects the tiny violation") {
    const auto f = singlet_family(AngleSet::from_degrees({0, 0.001, 0.002}));
    CHECK(check_compatibility(f, floating()).feasible());
    const auto v = check_compatibility(f, exact());
    CHECK_FALSE(v.feasible());
    require_valid_certificate(f, v);
    const auto q = solve_quasi(f, exact());
    CHECK(q.negativity > 0);
    CHECK(to_double(q.negativity) < 1e-9);
  }
  SUBCASE("angles 45 degrees apart pairwise are compatible") {
    const auto f = singlet_family(AngleSet::from_degrees({0, 45, 90}));
    const auto v = check_compatibility(f, exact());
    CHECK(v.feasible());
    CHECK(brute_force_compatibility(f).feasible());
  }
}

TEST_CASE("check_compatibility agrees with the brute-force oracle on random n = 3 families") {
  std::mt19937_64 rng(20240611);
  int feasible = 0, infeasible = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto f = random_family(rng);
    REQUIRE(validate_family(f, Arithmetic::Exact).empty());
    const auto lp = check_compatibility(f, exact());
    const auto oracle = brute_force_compatibility(f);
    REQUIRE(lp.feasible() == oracle.feasible());
    if (lp.feasible()) {
      ++feasible;
      REQUIRE(lp.witness.has_value());
      CHECK(lp.witness->nonnegative());
      CHECK(reproduces(f, *lp.witness, Arithmetic::Exact));
      REQUIRE(oracle.witness.has_value());
      CHECK(reproduces(f, *oracle.witness, Arithmetic::Exact));
    } else {
      ++infeasible;
      require_valid_certificate(f, lp);
      require_valid_certificate(f, oracle);
      CHECK(solve_quasi(f, exact()).negativity > 0);
    }
  }
  CHECK(feasible > 50);
  CHECK(infeasible > 50);
}

TEST_CASE("soundness: marginals of any nonnegative joint are compatible") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const auto joint = testing::random_joint(rng, n);
    const auto f = joint.all_pair_marginals();
    const auto v = check_compatibility(f, exact());
    REQUIRE(v.feasible());
    CHECK(v.witness->nonnegative());
    CHECK(v.witness->total() == 1);
    CHECK(reproduces(f, *v.witness, Arithmetic::Exact));
    if (n <= 4) CHECK(brute_force_compatibility(f).feasible());
    CHECK(solve_quasi(f, exact()).negativity == 0);
  }
}

TEST_CASE("partial families from a joint are compatible") {
  std::mt19937_64 rng(5);
  const auto joint = testing::random_joint(rng, 5);
  const auto f = joint.marginals_for({{0, 1}, {1, 2}, {3, 4}});
  const auto v = check_compatibility(f);
  REQUIRE(v.feasible());
  CHECK(reproduces(f, *v.witness, Arithmetic::Exact));
}

TEST_CASE("quasi solutions reproduce the family and are never less negative than optimal") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 60; ++trial) {
    const auto f = random_family(rng);
    const auto q = solve_quasi(f, exact());
    CHECK(q.joint.total() == 1);
    CHECK(reproduces(f, q.joint, Arithmetic::Exact));
    CHECK(q.joint.negativity() == q.negativity);
    // The moment expansion covers every signed solution for n = 3.
    std::array<Rational, 3> m;
    for (std::size_t k = 0; k < 3; ++k) {
      const auto& t = f.tables[k == 2 ? 1 : 0];
      m[k] = 2 * (k == 0 ? t.first_plus() : t.second_plus()) - 1;
    }
    std::array<Rational, 3> m2;
    for (std::size_t k = 0; k < 3; ++k) {
      const auto& c = f.tables[k].cells();
      m2[k] = c[kPP] - c[kPM] - c[kMP] + c[kMM];
    }
    CHECK(testing::grid_min_negativity(m, m2, 64) >= q.negativity);
    CHECK((q.negativity == 0) == check_compatibility(f, exact()).feasible());
  }
}

TEST_CASE("float mode handles a larger family") {
  std::mt19937_64 rng(77);
  const auto joint = testing::random_joint(rng, 10);
  const auto f = joint.all_pair_marginals();
  const auto v = check_compatibility(f, floating());
  REQUIRE(v.feasible());
  CHECK(reproduces(f, *v.witness, Arithmetic::Float));
}

TEST_CASE("default arithmetic switches to float above twelve variables") {
  SolverOptions o;
  CHECK(o.resolve(12) == Arithmetic::Exact);
  CHECK(o.resolve(13) == Arithmetic::Float);
}

TEST_CASE("invalid or oversized families are rejected") {
  MarginalFamily bad = testing::incompatible_triple();
  bad.tables[0] = PairwiseTable(0, 1, {frac(1, 2), frac(1, 2), frac(1, 2), 0});
  CHECK_THROWS_AS(check_compatibility(bad), InvalidInput);
  CHECK_THROWS_AS(solve_quasi(bad), InvalidInput);

  MarginalFamily big;
  big.n = 21;
  big.tables = {PairwiseTable(0, 20, {frac(1, 4), frac(1, 4), frac(1, 4), frac(1, 4)})};
  CHECK_THROWS_AS(check_compatibility(big), InvalidInput);
  SolverOptions wide;
  wide.variable_cap = 21;
  CHECK_NOTHROW(require_solvable(big, wide));

  MarginalFamily five;
  five.n = 5;
  five.tables = {PairwiseTable(0, 4, {frac(1, 4), frac(1, 4), frac(1, 4), frac(1, 4)})};
  CHECK_THROWS_AS(brute_force_compatibility(five), InvalidInput);
}

TEST_CASE("certificate_gap rejects non-certificates") {
  const auto f = testing::incompatible_triple();
  std::vector<Rational> zero(constraint_rows(f));
  CHECK_FALSE(certificate_gap(f, zero).has_value());
  std::vector<Rational> wrong_size(3);
  CHECK_FALSE(certificate_gap(f, wrong_size).has_value());
  // y = e_0 gives y.b = 1 but also y.A = 1 on every column.
  std::vector<Rational> norm(constraint_rows(f));
  norm[0] = 1;
  CHECK_FALSE(certificate_gap(f, norm).has_value());
}

TEST_CASE("constraint layout") {
  const auto f = testing::incompatible_triple();
  CHECK(constraint_rows(f) == 13);
  const auto rhs = constraint_rhs(f);
  CHECK(rhs[0] == 1);
  CHECK(rhs[1 + 4 * 2 + kPM] == frac(1, 2));
  // Atom (+,-,+): table (0,1) cell +-, table (0,2) cell ++, table (1,2) cell -+.
  const auto rows = atom_rows(f, encode_atom({1, -1, 1}));
  CHECK(rows == std::vector<std::size_t>{0, 1 + kPM, 5 + kPP, 9 + kMP});
}
