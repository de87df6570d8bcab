#include "dro/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dro {

StepSchedule StepSchedule::polynomial(double tau0, double exponent) {
  if (!(tau0 > 0.0))
    throw std::invalid_argument("StepSchedule::polynomial: tau0 must be positive");
  if (!(exponent > 0.5) || !(exponent <= 1.0))
    throw std::invalid_argument("StepSchedule::polynomial: exponent must be in (0.5, 1]");
  StepSchedule s;
  s.kind_ = Kind::polynomial;
  s.tau0_ = tau0;
  s.exponent_ = exponent;
  return s;
}

StepSchedule StepSchedule::constant_over_sqrt(double tau0, std::size_t horizon) {
  if (!(tau0 > 0.0))
    throw std::invalid_argument("StepSchedule::constant_over_sqrt: tau0 must be positive");
  if (horizon == 0)
    throw std::invalid_argument("StepSchedule::constant_over_sqrt: horizon must be positive");
  StepSchedule s;
  s.kind_ = Kind::constant;
  s.constant_ = tau0 / std::sqrt(static_cast<double>(horizon));
  return s;
}

double StepSchedule::tau(std::size_t k, double a) const {
  if (!(a > 0.0)) throw std::invalid_argument("StepSchedule::tau: a must be positive");
  const double cap = std::min(1.0, 1.0 / a);
  double raw;
  switch (kind_) {
    case Kind::polynomial:
      raw = tau0_ / std::pow(static_cast<double>(k) + 1.0, exponent_);
      break;
    case Kind::constant:
      raw = constant_;
      break;
    default:
      raw = constant_;
      break;
  }
  return std::min(cap, raw);
}

}  // namespace dro
