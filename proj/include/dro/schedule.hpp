#pragma once

#include <cstddef>
#include <cstdint>

namespace dro {

// Step-size sequence for the averaged solvers. Every value is capped at
// min(1, 1/a) so the dual averaging weight a*tau stays in (0, 1].
class StepSchedule {
 public:
  // tau_k = tau0 / (k+1)^exponent, exponent in (0.5, 1].
  static StepSchedule polynomial(double tau0, double exponent);
  // tau_k = tau0 / sqrt(horizon) for a fixed iteration budget.
  static StepSchedule constant_over_sqrt(double tau0, std::size_t horizon);

  double tau(std::size_t k, double a) const;

 private:
  StepSchedule() = default;

  enum class Kind : std::uint8_t { polynomial, constant };
  Kind kind_ = Kind::polynomial;
  double tau0_ = 1.0;
  double exponent_ = 0.75;
  double constant_ = 1.0;
};

}  // namespace dro
