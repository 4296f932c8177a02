#pragma once

#include <cmath>
#include <stdexcept>

namespace sgdlab {

// Learning-rate rule a_n. Decreasing schedules a / n^beta with
// beta in (1/2, 1] satisfy sum a_n = inf and sum a_n^2 < inf by
// construction; constant schedules are only meaningful on finite horizons.
struct Schedule {
  enum class Kind { kDecreasing, kConstant };

  Kind kind = Kind::kConstant;
  double a = 0.0;
  double beta = 1.0;  // used by kDecreasing only

  static Schedule decreasing(double a, double beta) {
    if (!(a >= 0.0) || !std::isfinite(a))
      throw std::invalid_argument("schedule: damping parameter must be non-negative");
    if (!(beta > 0.5) || !(beta <= 1.0))
      throw std::invalid_argument("schedule: beta must lie in (1/2, 1]");
    return {Kind::kDecreasing, a, beta};
  }

  static Schedule constant(double a) {
    if (!(a >= 0.0) || !std::isfinite(a))
      throw std::invalid_argument("schedule: rate must be non-negative");
    return {Kind::kConstant, a, 1.0};
  }

  double rate(long n) const {
    return kind == Kind::kDecreasing ? a / std::pow(static_cast<double>(n), beta) : a;
  }
};

inline bool operator==(const Schedule& lhs, const Schedule& rhs) {
  return lhs.kind == rhs.kind && lhs.a == rhs.a &&
         (lhs.kind == Schedule::Kind::kConstant || lhs.beta == rhs.beta);
}

}  // namespace sgdlab
