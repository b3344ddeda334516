#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace bellcompat {

using Rational = mpq_class;

/// Parses "3/8", "0.375", "-2", "1e-3" exactly (decimal strings are read as
/// their exact decimal value, not via binary floating point).
/// Throws std::invalid_argument on malformed text.
Rational parse_rational(std::string_view text);

/// Simplest continued-fraction convergent within `tolerance` of `value`;
/// the exact binary value when no coarser convergent is close enough.
Rational rationalize(double value, double tolerance = 1e-15);

inline double to_double(const Rational& q) { return q.get_d(); }

std::string to_string(const Rational& q);

}  // namespace bellcompat
