#include "bellcompat/singlet.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace bellcompat {

AngleSet::AngleSet(std::vector<double> radians) : angles_(std::move(radians)) {
  if (angles_.size() < 2) throw InvalidInput("an angle set needs at least two settings");
  for (std::size_t i = 0; i < angles_.size(); ++i) {
    if (!std::isfinite(angles_[i])) throw InvalidInput("non-finite angle");
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(std::remainder(angles_[i] - angles_[j], std::numbers::pi)) < 1e-12) {
        std::ostringstream os;
        os << "angles " << j << " and " << i << " coincide modulo 180 degrees";
        throw InvalidInput(os.str());
      }
    }
  }
}

AngleSet AngleSet::from_degrees(const std::vector<double>& degrees) {
  std::vector<double> radians;
  radians.reserve(degrees.size());
  for (double d : degrees) radians.push_back(deg_to_rad(d));
  return AngleSet(std::move(radians));
}

PairwiseTable singlet_pair_table(double theta1, double theta2, std::size_t first,
                                 std::size_t second) {
  const double c = std::cos(theta1 - theta2);
  const Rational same = rationalize(0.5 * c * c);
  const Rational differ = Rational(1, 2) - same;
  return PairwiseTable(first, second, {same, differ, differ, same});
}

double singlet_correlation(double theta1, double theta2) {
  return std::cos(2.0 * (theta1 - theta2));
}

MarginalFamily singlet_family(const AngleSet& angles, FamilyMode mode) {
  MarginalFamily family;
  family.n = angles.size();
  for (double a : angles.angles()) {
    std::ostringstream os;
    os << "theta=" << rad_to_deg(a) << "deg";
    family.labels.push_back(os.str());
  }
  if (mode == FamilyMode::Chsh) {
    if (angles.size() != 4) throw InvalidInput("CHSH mode needs exactly four angles");
    for (auto [i, j] : {std::pair<std::size_t, std::size_t>{0, 2}, {0, 3}, {1, 2}, {1, 3}}) {
      family.tables.push_back(singlet_pair_table(angles[i], angles[j], i, j));
    }
    return family;
  }
  for (std::size_t i = 0; i < angles.size(); ++i) {
    for (std::size_t j = i + 1; j < angles.size(); ++j) {
      family.tables.push_back(singlet_pair_table(angles[i], angles[j], i, j));
    }
  }
  return family;
}

}  // namespace bellcompat
