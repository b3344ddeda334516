#pragma once

// Shared fixtures for the unit suites.

#include "bellcompat/types.hpp"

#include <random>

namespace testing {

using bellcompat::MarginalFamily;
using bellcompat::PairwiseTable;
using bellcompat::Rational;

/// <a1,a2> = 1, <a1,a3> = 1, <a2,a3> = -1 with uniform single marginals.
inline MarginalFamily incompatible_triple() {
  const Rational h(1, 2), z(0);
  MarginalFamily f;
  f.n = 3;
  f.tables = {PairwiseTable(0, 1, {h, z, z, h}), PairwiseTable(0, 2, {h, z, z, h}),
              PairwiseTable(1, 2, {z, h, h, z})};
  return f;
}

/// Canonical a / b.
inline Rational frac(long a, long b) {
  Rational q(a, b);
  q.canonicalize();
  return q;
}

inline Rational random_rational(std::mt19937_64& rng, long denominator = 64) {
  std::uniform_int_distribution<long> d(0, denominator);
  return frac(d(rng), denominator);
}

/// Random nonnegative joint with weights k / sum, k in 0..max_weight.
inline bellcompat::SignedJoint random_joint(std::mt19937_64& rng, std::size_t n,
                                            long max_weight = 9) {
  std::uniform_int_distribution<long> d(0, max_weight);
  std::vector<Rational> w(std::size_t{1} << n);
  long total = 0;
  std::vector<long> raw(w.size());
  for (auto& r : raw) total += r = d(rng);
  if (total == 0) {
    raw[0] = 1;
    total = 1;
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = frac(raw[i], total);
  }
  return bellcompat::SignedJoint(n, std::move(w));
}

/// Signed weights from the moment expansion of three +-1 variables:
/// w(s) = (1 + sum m_i s_i + sum m_ij s_i s_j + t s1 s2 s3) / 8.
/// Every signed measure with those one- and two-point moments has this form.
inline std::vector<Rational> moment_weights(const std::array<Rational, 3>& m,
                                            const std::array<Rational, 3>& m2,  // 01, 02, 12
                                            const Rational& t) {
  std::vector<Rational> w(8);
  for (unsigned atom = 0; atom < 8; ++atom) {
    const int s0 = (atom & 1) ? 1 : -1;
    const int s1 = (atom & 2) ? 1 : -1;
    const int s2 = (atom & 4) ? 1 : -1;
    w[atom] = (1 + s0 * m[0] + s1 * m[1] + s2 * m[2] + s0 * s1 * m2[0] + s0 * s2 * m2[1] +
               s1 * s2 * m2[2] + s0 * s1 * s2 * t) /
              8;
  }
  return w;
}

inline Rational negativity_of(const std::vector<Rational>& w) {
  Rational neg(0);
  for (const auto& x : w) {
    if (x < 0) neg -= x;
  }
  return neg;
}

/// Grid oracle: min over t in [-2, 2] (step 1/steps) of the negativity of the
/// moment-expanded signed measure.
inline Rational grid_min_negativity(const std::array<Rational, 3>& m,
                                    const std::array<Rational, 3>& m2, long steps = 400) {
  Rational best(-1);
  for (long k = -2 * steps; k <= 2 * steps; ++k) {
    const Rational neg = negativity_of(moment_weights(m, m2, frac(k, steps)));
    if (best < 0 || neg < best) best = neg;
  }
  return best;
}

}  // namespace testing
