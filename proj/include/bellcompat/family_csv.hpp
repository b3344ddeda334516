#pragma once

// Pairwise-table families as CSV:
//   var_i,var_j,p_pp,p_pm,p_mp,p_mm
// Variables are 0-based integers; n is one more than the largest index.
// Probabilities are exact decimals or fractions ("0.125", "1/8").

#include "bellcompat/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace bellcompat {

inline constexpr const char* kFamilyHeader = "var_i,var_j,p_pp,p_pm,p_mp,p_mm";

/// Throws ParseError with the offending line. Table-level invariants
/// (normalization, consistency) are left to validate_family.
MarginalFamily parse_family_csv(std::istream& in, const std::string& source = "<input>");
MarginalFamily parse_family_csv(const std::filesystem::path& path);

void write_family_csv(std::ostream& out, const MarginalFamily& family);

}  // namespace bellcompat
