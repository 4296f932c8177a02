#pragma once

#include <optional>
#include <vector>

#include "sgdlab/schedule.hpp"

namespace sgdlab {

// Closed-form evaluation of the stability and concentration bounds.
//
// With b_1 = 1 and b_n = prod_{j<n} (1 + L^2 a_j^2), the stability-failure
// bound over a horizon of N states is
//
//   C_N = (b_N / r^2) (dist_1^2 + (sigma_r / I) sum_{n=1}^{N-1} a_n^2 / b_{n+1})
//
// and the iterates stay in N_r(X) with probability at least 1 - C_N.

struct BoundInputs {
  double dist1 = 0.0;     // dist(x_1, X)
  double radius = 0.0;    // r
  double lipschitz = 0.0; // L_r, gradient Lipschitz constant on N_r(X)
  double sigma_r = 0.0;   // bound on E|xi|^2 per single sample over N_r(X)
  int batch_size = 1;     // I
  Schedule schedule;
  // Number of states; absent means N = infinity (decreasing schedules only).
  std::optional<long> horizon;
};

/// Throws std::invalid_argument when the premise dist1 <= r fails or the
/// remaining parameters are out of range.
void validate(const BoundInputs& inputs);

struct BoundReport {
  // log b_1 .. log b_N when the horizon is finite (kept in log space).
  std::vector<double> log_b;
  double b_final = 1.0;  // b_N, or b_infinity for infinite horizons
  double cn = 0.0;
  double stability_lower_bound = 1.0;  // 1 - C_N, may be negative
  bool vacuous = false;                // C_N >= 1: the bound carries no information
};

/// b_n = prod_{j=1}^{n-1} (1 + L^2 a_j^2), accumulated as exp(sum log1p).
double compute_bn(double lipschitz, const Schedule& schedule, long n);

/// C_N and the stability lower bound 1 - C_N. For N = infinity the series
/// sum a_n^2 / b_{n+1} telescopes to (1 - 1/b_inf) / L^2 and log b_inf is
/// accumulated with an analytic tail, so no truncation error is incurred.
BoundReport compute_cn(const BoundInputs& inputs);

struct DecreasingLrBound {
  bool holds = false;
  double lhs = 0.0;
  double margin = 0.0;  // r^2 - lhs
  double max_a = 0.0;   // largest accepted damping parameter (bisection)
};

/// Sufficient condition for 1 - C_inf > 0 with a_n = a / n^beta:
///   exp(2 beta L^2 a^2 / (2 beta - 1)) (dist_1^2
///       + 2 beta sigma_r a^2 / ((2 beta - 1) I)) < r^2.
/// The left side is strictly increasing in a; max_a is located by bisection
/// to 1e-10 (infinite when the left side never reaches r^2).
DecreasingLrBound check_decreasing_lr_bound(const BoundInputs& inputs);

struct ConstantLrBound {
  bool holds = false;
  double lhs = 0.0;
  double margin = 0.0;
};

/// Sufficient condition for 1 - C_N > 0 with a constant rate a:
///   (1 + L^2 a^2)^{N-1} (dist_1^2
///       + sigma_r / (I L^2) (1 - (1 + L^2 a^2)^{-(N-1)})) < r^2.
ConstantLrBound check_constant_lr_bound(const BoundInputs& inputs);

/// Bound on P{ min_{n<=N} h(x_n) > eps }:
///   (1/eps) (dist_1^2 + (sigma_r/I) sum_{n=1}^{N} a_n^2/b_{n+1})
///         / (2 sum_{n=1}^{N} a_n/b_{n+1})  +  C_{N+1}.
double concentration_rhs(const BoundInputs& inputs, double epsilon, long n_states);

enum class RateKind { kWqc, kHcprcOrLrsi };

/// Predicted decay exponent for a_n = a / n^beta with beta in (1/2, 1):
/// 1 - beta for the running-minimum gap under WQC, beta for the last-iterate
/// gap under HCPRC or LRSI.
double predicted_rate(RateKind kind, double beta);

}  // namespace sgdlab
