#pragma once

#include <variant>
#include <vector>

#include "sgdlab/rng.hpp"
#include "sgdlab/types.hpp"

namespace sgdlab {

// Gradient-noise models satisfying the unbiasedness and locally bounded
// second moment assumptions.

/// Isotropic Gaussian: each component N(0, sigma^2), so E|xi|^2 = sigma^2 * d
/// per single sample. With state_scaled the deviate is multiplied by
/// (1 + dist(x, X)), a locally (not globally) bounded variance.
struct GaussianNoise {
  double sigma = 0.0;
  bool state_scaled = false;
};

/// Finite-sum sampling noise: component gradients grad f(x) + offset_j with
/// offsets summing to zero, drawn uniformly. xi = offset_j, so the mean is
/// zero and E|xi|^2 is the mean squared offset norm.
struct FiniteSumNoise {
  std::vector<Vector> offsets;
};

using NoiseModel = std::variant<GaussianNoise, FiniteSumNoise>;

void validate(const NoiseModel& noise, int dim);

/// One single-sample draw of xi at a state with the given distance to X.
Vector draw_noise(const NoiseModel& noise, int dim, double dist_to_set, RngStream& rng);

/// Declared bound on sup over N_r(X) of E|xi|^2 for a single sample.
double noise_second_moment_bound(const NoiseModel& noise, int dim, double radius);

}  // namespace sgdlab
