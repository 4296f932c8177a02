#include "sgdlab/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace sgdlab {

void validate(const NoiseModel& noise, int dim) {
  if (const auto* g = std::get_if<GaussianNoise>(&noise)) {
    if (!(g->sigma >= 0.0) || !std::isfinite(g->sigma))
      throw std::invalid_argument("noise: sigma must be non-negative");
    return;
  }
  const auto& fs = std::get<FiniteSumNoise>(noise);
  if (fs.offsets.empty()) throw std::invalid_argument("noise: finite sum needs components");
  Vector sum = Vector::Zero(dim);
  double scale = 0.0;
  for (const auto& off : fs.offsets) {
    if (off.size() != dim) throw std::invalid_argument("noise: component dimension mismatch");
    if (!off.allFinite()) throw std::invalid_argument("noise: non-finite component");
    sum += off;
    scale = std::max(scale, off.norm());
  }
  if (sum.norm() > 1e-9 * (1.0 + scale))
    throw std::invalid_argument("noise: finite-sum components must average to the full gradient");
}

Vector draw_noise(const NoiseModel& noise, int dim, double dist_to_set, RngStream& rng) {
  if (const auto* g = std::get_if<GaussianNoise>(&noise)) {
    const double scale = g->state_scaled ? g->sigma * (1.0 + dist_to_set) : g->sigma;
    return scale * rng.gaussian(dim);
  }
  const auto& fs = std::get<FiniteSumNoise>(noise);
  return fs.offsets[rng.uniform_index(fs.offsets.size())];
}

double noise_second_moment_bound(const NoiseModel& noise, int dim, double radius) {
  if (const auto* g = std::get_if<GaussianNoise>(&noise)) {
    const double base = g->sigma * g->sigma * dim;
    if (!g->state_scaled) return base;
    const double amp = 1.0 + radius;
    return base * amp * amp;
  }
  const auto& fs = std::get<FiniteSumNoise>(noise);
  double total = 0.0;
  for (const auto& off : fs.offsets) total += off.squaredNorm();
  return total / static_cast<double>(fs.offsets.size());
}

}  // namespace sgdlab
