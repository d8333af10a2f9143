#ifndef EDFA_UNITS_HPP
#define EDFA_UNITS_HPP

#include <cmath>
#include <stdexcept>

namespace edfa {

struct NonPositivePower : std::domain_error {
  explicit NonPositivePower(double value)
      : std::domain_error("power must be > 0 mW, got " + std::to_string(value)) {}
};

inline double dbm_to_mw(double p_dbm) { return std::pow(10.0, p_dbm / 10.0); }

inline double mw_to_dbm(double p_mw) {
  if (!(p_mw > 0.0)) throw NonPositivePower(p_mw);
  return 10.0 * std::log10(p_mw);
}

}  // namespace edfa

#endif
