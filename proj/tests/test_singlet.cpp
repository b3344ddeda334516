#include "bellcompat/marginal_solver.hpp"
#include "bellcompat/singlet.hpp"

#include <doctest.h>

#include <cmath>

using namespace bellcompat;

namespace {

std::array<double, 4> cells_at(double d1, double d2) {
  return singlet_pair_table(deg_to_rad(d1), deg_to_rad(d2)).as_double();
}

void check_cells(const std::array<double, 4>& got, const std::array<double, 4>& want) {
  for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(got[k] - want[k]) <= 1e-12);
}

}  // namespace

TEST_CASE("singlet tables at the reference angles") {
  check_cells(cells_at(0, 0), {0.5, 0, 0, 0.5});
  check_cells(cells_at(0, 60), {0.125, 0.375, 0.375, 0.125});
  check_cells(cells_at(0, 90), {0, 0.5, 0.5, 0});
  CHECK(std::abs(singlet_correlation(0, deg_to_rad(60)) + 0.5) <= 1e-12);
  CHECK(std::abs(singlet_correlation(0, 0) - 1.0) <= 1e-12);
}

TEST_CASE("singlet tables are exactly normalized with uniform marginals") {
  for (double d = 0; d < 180; d += 7.3) {
    const auto t = singlet_pair_table(0.1, 0.1 + deg_to_rad(d));
    CHECK(validate_table(t, Arithmetic::Exact).empty());
    CHECK(t.first_plus() == Rational(1, 2));
    CHECK(t.second_plus() == Rational(1, 2));
    CHECK(std::abs(correlation_of(t) - std::cos(2 * deg_to_rad(d))) <= 1e-12);
  }
}

TEST_CASE("angle sets") {
  CHECK_THROWS_AS(AngleSet::from_degrees({0}), InvalidInput);
  CHECK_THROWS_AS(AngleSet::from_degrees({0, 180}), InvalidInput);
  CHECK_THROWS_AS(AngleSet::from_degrees({10, 30, 10}), InvalidInput);
  CHECK_THROWS_AS(AngleSet({0.0, NAN}), InvalidInput);
  CHECK(AngleSet::from_degrees({0, 60, 30}).size() == 3);
}

TEST_CASE("family modes") {
  const auto angles = AngleSet::from_degrees({0, 45, 22.5, 67.5});
  const auto all = singlet_family(angles);
  CHECK(all.tables.size() == 6);
  CHECK(all.labels.size() == 4);
  const auto cross = singlet_family(angles, FamilyMode::Chsh);
  REQUIRE(cross.tables.size() == 4);
  CHECK(cross.tables[0].first() == 0);
  CHECK(cross.tables[0].second() == 2);
  CHECK(cross.tables[3].first() == 1);
  CHECK(cross.tables[3].second() == 3);
  CHECK_THROWS_AS(singlet_family(AngleSet::from_degrees({0, 60, 30}), FamilyMode::Chsh),
                  InvalidInput);
  CHECK(validate_family(all, Arithmetic::Exact).empty());
}

TEST_CASE("singlet compatibility verdicts") {
  CHECK_FALSE(check_compatibility(singlet_family(AngleSet::from_degrees({0, 60, 30}))).feasible());
  const auto chsh_family = singlet_family(AngleSet::from_degrees({0, 45, 22.5, 67.5}), FamilyMode::Chsh);
  CHECK_FALSE(check_compatibility(chsh_family).feasible());
  CHECK(check_compatibility(singlet_family(AngleSet::from_degrees({0, 90}))).feasible());
}
