#include "bellcompat/inequalities.hpp"

#include "bellcompat/types.hpp"

#include <cmath>
#include <sstream>

namespace bellcompat {

namespace {

// Rounding in summed frequencies may overshoot the range by `tolerance`.
void require_in(double v, double lo, double hi, double tolerance, const char* what) {
  if (!(v >= lo - tolerance && v <= hi + tolerance)) {
    std::ostringstream os;
    os.precision(17);
    os << what << ": input " << v << " outside [" << lo << ", " << hi << "]";
    throw InvalidInput(os.str());
  }
}

InequalityReport make_report(std::string name, double lhs, double rhs, double tolerance) {
  return {std::move(name), lhs, rhs, lhs > rhs + tolerance, lhs - rhs};
}

}  // namespace

InequalityReport bell_covariance(double e_ab, double e_cb, double e_ac, double tolerance) {
  require_in(e_ab, -1, 1, tolerance, "bell_covariance");
  require_in(e_cb, -1, 1, tolerance, "bell_covariance");
  require_in(e_ac, -1, 1, tolerance, "bell_covariance");
  return make_report("bell-covariance", std::abs(e_ab - e_cb), 1.0 - e_ac, tolerance);
}

InequalityReport wigner(double p_ab_pp, double p_bc_mp, double p_ac_pp, double tolerance) {
  require_in(p_ab_pp, 0, 1, tolerance, "wigner");
  require_in(p_bc_mp, 0, 1, tolerance, "wigner");
  require_in(p_ac_pp, 0, 1, tolerance, "wigner");
  return make_report("wigner", p_ac_pp, p_ab_pp + p_bc_mp, tolerance);
}

InequalityReport chsh(double e_ab, double e_abp, double e_apb, double e_apbp, double tolerance) {
  for (double e : {e_ab, e_abp, e_apb, e_apbp}) require_in(e, -1, 1, tolerance, "chsh");
  return make_report("chsh", std::abs(e_ab + e_abp + e_apb - e_apbp), 2.0, tolerance);
}

}  // namespace bellcompat
