#include "bellcompat/rational.hpp"
#include "bellcompat/types.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace bellcompat;
using testing::frac;

TEST_CASE("parse_rational reads decimals and fractions exactly") {
  CHECK(parse_rational("3/8") == frac(3, 8));
  CHECK(parse_rational("0.375") == frac(3, 8));
  CHECK(parse_rational("-2") == -2);
  CHECK(parse_rational("1e-3") == frac(1, 1000));
  CHECK(parse_rational("0.1") == frac(1, 10));
  CHECK(parse_rational(" 1/2 ") == frac(1, 2));
  CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
}

TEST_CASE("rationalize finds the simplest nearby fraction") {
  CHECK(rationalize(0.125) == frac(1, 8));
  CHECK(rationalize(0.375) == frac(3, 8));
  CHECK(rationalize(1.0 / 3.0) == frac(1, 3));
  CHECK(rationalize(-0.75) == frac(-3, 4));
  CHECK(rationalize(0.0) == 0);
  const double c = std::cos(deg_to_rad(60.0));
  CHECK(rationalize(0.5 * c * c) == frac(1, 8));
  const double x = std::sqrt(2.0);
  CHECK(std::abs(to_double(rationalize(x)) - x) <= 1e-15);
}

TEST_CASE("pairwise table validation") {
  const PairwiseTable ok(0, 1, {frac(1, 2), 0, 0, frac(1, 2)});
  CHECK(validate_table(ok, Arithmetic::Exact).empty());
  CHECK(correlation_of(ok) == doctest::Approx(1.0));

  const PairwiseTable neg(0, 1, {frac(3, 4), frac(-1, 4), frac(1, 4), frac(1, 4)});
  const auto r = validate_table(neg, Arithmetic::Exact);
  REQUIRE_FALSE(r.empty());
  CHECK(r.front().invariant == "nonnegative-cell");
  CHECK_THROWS_AS(correlation_of(neg), InvalidInput);

  const PairwiseTable off(0, 1, {frac(1, 2), frac(1, 2), frac(1, 1000), 0});
  CHECK_FALSE(validate_table(off, Arithmetic::Exact).empty());

  const PairwiseTable same(2, 2, {frac(1, 2), 0, 0, frac(1, 2)});
  CHECK(validate_table(same).front().invariant == "distinct-pair");

  // Within the float tolerance but not exactly normalized.
  const PairwiseTable near = PairwiseTable::from_doubles(0, 1, {0.25, 0.25, 0.25, 0.25 + 1e-12});
  CHECK(validate_table(near, Arithmetic::Float).empty());
  CHECK_FALSE(validate_table(near, Arithmetic::Exact).empty());
}

TEST_CASE("transposed table swaps the mixed cells") {
  const PairwiseTable t(0, 1, {frac(1, 10), frac(2, 10), frac(3, 10), frac(4, 10)});
  const auto u = t.transposed();
  CHECK(u.first() == 1);
  CHECK(u.second() == 0);
  CHECK(u.cell(kPM) == frac(3, 10));
  CHECK(u.cell(kMP) == frac(2, 10));
  CHECK(u.first_plus() == t.second_plus());
}

TEST_CASE("family validation catches inconsistent single marginals") {
  MarginalFamily f = testing::incompatible_triple();
  CHECK(validate_family(f, Arithmetic::Exact).empty());

  f.tables[2] = PairwiseTable(1, 2, {frac(1, 4), frac(1, 2), frac(1, 4), 0});  // P(a2=+) = 3/4
  const auto r = validate_family(f, Arithmetic::Exact);
  REQUIRE_FALSE(r.empty());
  CHECK(r.front().invariant == "single-marginal-consistency");

  MarginalFamily dup = testing::incompatible_triple();
  dup.tables.push_back(dup.tables[0].transposed());
  CHECK(validate_family(dup).front().invariant == "one-table-per-pair");

  MarginalFamily range = testing::incompatible_triple();
  range.n = 2;
  CHECK(validate_family(range).front().invariant == "variable-range");
}

TEST_CASE("atom encoding round-trips for every n up to 20") {
  for (std::size_t n = 1; n <= 20; ++n) {
    const std::uint64_t atoms = std::uint64_t{1} << n;
    const std::uint64_t step = std::max<std::uint64_t>(1, atoms / 997);
    for (std::uint64_t a = 0; a < atoms; a += step) {
      const auto signs = decode_atom(a, n);
      REQUIRE(signs.size() == n);
      for (std::size_t k = 0; k < n; ++k) CHECK((signs[k] == 1) == atom_plus(a, k));
      CHECK(encode_atom(signs) == a);
    }
    CHECK(encode_atom(decode_atom(atoms - 1, n)) == atoms - 1);
  }
  CHECK_THROWS_AS(encode_atom({1, 0, -1}), InvalidInput);
}

TEST_CASE("pair marginals of a joint are valid tables summing to the joint total") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 4;
    const auto joint = testing::random_joint(rng, n);
    CHECK(joint.total() == 1);
    CHECK(joint.nonnegative());
    CHECK(joint.negativity() == 0);
    const auto family = joint.all_pair_marginals();
    CHECK(family.tables.size() == n * (n - 1) / 2);
    CHECK(validate_family(family, Arithmetic::Exact).empty());
  }
}

TEST_CASE("point mass marginals") {
  const auto joint = SignedJoint::point_mass(3, encode_atom({1, -1, 1}));
  const auto t = joint.pair_marginal(0, 1);
  CHECK(t.cell(kPM) == 1);
  CHECK(joint.pair_marginal(0, 2).cell(kPP) == 1);
  CHECK(joint.pair_marginal(1, 2).cell(kMP) == 1);
  CHECK_THROWS_AS(joint.pair_marginal(1, 1), InvalidInput);
  CHECK_THROWS_AS(SignedJoint(3, std::vector<Rational>(7)), InvalidInput);
}

TEST_CASE("signed joint negativity") {
  const SignedJoint j(1, {frac(3, 2), frac(-1, 2)});
  CHECK(j.total() == 1);
  CHECK(j.negativity() == frac(1, 2));
  CHECK_FALSE(j.nonnegative());
}

TEST_CASE("angle conversion") {
  CHECK(deg_to_rad(180.0) == doctest::Approx(M_PI));
  CHECK(rad_to_deg(deg_to_rad(37.5)) == doctest::Approx(37.5));
}
