#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sgdlab/landscape.hpp"
#include "sgdlab/noise.hpp"
#include "sgdlab/schedule.hpp"
#include "sgdlab/types.hpp"

namespace sgdlab {

// The iteration x_{n+1} = x_n - a_n (grad f(x_n) + xi_n) with batch-averaged
// noise, plus the stopped-process bookkeeping: the trajectory freezes at the
// first exit from the closed neighborhood N_r(X).

struct SgdConfig {
  Landscape landscape;
  NeighborhoodSpec region;
  Schedule schedule;
  NoiseModel noise;
  int batch_size = 1;
  long horizon = 1;   // number of recorded states x_1..x_N
  Vector x1;
  std::uint64_t seed = 0;
};

/// Checks dimensions, batch_size >= 1, horizon >= 1 and dist(x1, X) <= r.
void validate(const SgdConfig& config);

struct StepRecord {
  long n = 0;
  double dist = 0.0;
  double gap = 0.0;   // f(x_n) - f_star
  double h = 0.0;     // registered support value (or the raw inner product)
  double rate = 0.0;  // a_n
  bool stopped = false;
};

struct Trajectory {
  std::vector<StepRecord> steps;
  // First n >= 2 with dist(x_n, X) > r; absent when the path never exits
  // within the horizon. Records with n >= exit_time repeat the state at the
  // exit time (the stopped process).
  std::optional<long> exit_time;
  bool stayed = true;
  Vector final_x;
};

struct TrajectorySummary {
  bool stayed = true;
  std::optional<long> exit_time;
  double min_h = 0.0;      // min over n of the recorded support values
  double final_gap = 0.0;  // gap at the last (possibly frozen) state
  double final_dist = 0.0;
};

/// One SGD update: x - a_n * (grad f(x) + mean of batch_size noise draws).
/// Each sample consumes the model's draws in a fixed order (Gaussian: the d
/// normal deviates; finite sum: one component index). Throws
/// TrajectoryError on a non-finite gradient or state.
Vector sgd_step(const Vector& x, const Landscape& landscape, const NoiseModel& noise, double rate,
                int batch_size, RngStream& rng);

/// Runs the iteration from x_1 for horizon states, recording every step and
/// freezing at the first exit. Deterministic given config.seed.
Trajectory run_trajectory(const SgdConfig& config);

/// Same iteration without storing per-step records (O(1) memory).
TrajectorySummary run_trajectory_summary(const SgdConfig& config);

struct ProbeResult {
  double lhs_estimate = 0.0;  // mean of dist(x', X)^2 over the simulations
  double rhs = 0.0;           // one-step upper bound at x
  double margin = 0.0;        // rhs - lhs_estimate
  double stderr_mean = 0.0;
};

/// Empirical one-step check of the supermartingale recursion
///   E[dist(x',X)^2 | x] <= (1 + L^2 a^2) dist(x,X)^2
///                          - 2 a (grad f(x), x - x_p) + (sigma_r / I) a^2.
/// Throws std::invalid_argument for m < 100 (too noisy to be meaningful).
ProbeResult supermartingale_probe(const Landscape& landscape, const NeighborhoodSpec& spec,
                                  const Vector& x, const NoiseModel& noise, int batch_size,
                                  double rate, double lipschitz, double sigma_r, long m,
                                  std::uint64_t seed);

}  // namespace sgdlab
