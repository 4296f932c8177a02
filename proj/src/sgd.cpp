#include "sgdlab/sgd.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sgdlab {

void validate(const SgdConfig& config) {
  validate(config.landscape.minima, config.landscape.dimension);
  validate(config.noise, config.landscape.dimension);
  if (config.batch_size < 1) throw std::invalid_argument("sgd: batch size must be >= 1");
  if (config.horizon < 1) throw std::invalid_argument("sgd: horizon must be >= 1");
  if (!(config.region.radius > 0.0)) throw std::invalid_argument("sgd: neighborhood radius must be positive");
  if (config.x1.size() != config.landscape.dimension)
    throw std::invalid_argument("sgd: x1 dimension mismatch");
  if (!config.x1.allFinite()) throw std::invalid_argument("sgd: x1 must be finite");
  if (dist_and_project(config.x1, config.region.minima).distance > config.region.radius)
    throw std::invalid_argument("sgd: x1 must start inside the r-neighborhood");
}

namespace {

Vector averaged_noise(const NoiseModel& noise, int dim, double dist, int batch_size,
                      RngStream& rng) {
  Vector acc = draw_noise(noise, dim, dist, rng);
  for (int i = 1; i < batch_size; ++i) acc += draw_noise(noise, dim, dist, rng);
  return acc / static_cast<double>(batch_size);
}

struct State {
  Vector x;
  ProjectionResult pr;
  Evaluation ev;
};

State make_state(const Landscape& landscape, Vector x) {
  State s;
  s.pr = dist_and_project(x, landscape.minima);
  s.ev = evaluate_at(landscape, x, s.pr);
  s.x = std::move(x);
  return s;
}

// Core loop shared by the recording and the summary runners. Visits the
// states x_1..x_N; after the first exit the visited state stays frozen.
template <typename Visit>
void iterate_sgd(const SgdConfig& config, RngStream& rng, std::optional<long>* exit_time,
                 Vector* final_x, Visit&& visit) {
  const Landscape& l = config.landscape;
  State s = make_state(l, config.x1);
  bool frozen = false;
  for (long n = 1; n <= config.horizon; ++n) {
    const double rate = config.schedule.rate(n);
    visit(n, s, rate, frozen);
    if (n == config.horizon || frozen) continue;
    if (!s.ev.gradient.allFinite())
      throw TrajectoryError("sgd: non-finite gradient at step " + std::to_string(n));
    const Vector xi =
        averaged_noise(config.noise, l.dimension, s.pr.distance, config.batch_size, rng);
    Vector next = s.x - rate * (s.ev.gradient + xi);
    if (!next.allFinite())
      throw TrajectoryError("sgd: non-finite state at step " + std::to_string(n + 1));
    s = make_state(l, std::move(next));
    if (s.pr.distance > config.region.radius) {
      // Boundary points count as inside: the neighborhood is closed.
      *exit_time = n + 1;
      frozen = true;
    }
  }
  *final_x = s.x;
}

}  // namespace

Vector sgd_step(const Vector& x, const Landscape& landscape, const NoiseModel& noise, double rate,
                int batch_size, RngStream& rng) {
  if (batch_size < 1) throw std::invalid_argument("sgd_step: batch size must be >= 1");
  const ProjectionResult pr = dist_and_project(x, landscape.minima);
  const Evaluation ev = evaluate_at(landscape, x, pr);
  if (!ev.gradient.allFinite()) throw TrajectoryError("sgd_step: non-finite gradient");
  const Vector xi = averaged_noise(noise, landscape.dimension, pr.distance, batch_size, rng);
  Vector next = x - rate * (ev.gradient + xi);
  if (!next.allFinite()) throw TrajectoryError("sgd_step: non-finite state");
  return next;
}

Trajectory run_trajectory(const SgdConfig& config) {
  validate(config);
  RngStream rng(config.seed);
  Trajectory traj;
  traj.steps.reserve(config.horizon);
  iterate_sgd(config, rng, &traj.exit_time, &traj.final_x,
              [&](long n, const State& s, double rate, bool frozen) {
                StepRecord rec;
                rec.n = n;
                rec.dist = s.pr.distance;
                rec.gap = s.ev.value - config.landscape.f_star;
                rec.h = support_value(config.landscape, s.x, s.ev, s.pr);
                rec.rate = rate;
                rec.stopped = frozen;
                traj.steps.push_back(rec);
              });
  traj.stayed = !traj.exit_time.has_value();
  return traj;
}

TrajectorySummary run_trajectory_summary(const SgdConfig& config) {
  validate(config);
  RngStream rng(config.seed);
  TrajectorySummary sum;
  sum.min_h = std::numeric_limits<double>::infinity();
  Vector final_x;
  iterate_sgd(config, rng, &sum.exit_time, &final_x,
              [&](long n, const State& s, double, bool) {
                (void)n;
                sum.min_h = std::min(sum.min_h, support_value(config.landscape, s.x, s.ev, s.pr));
                sum.final_gap = s.ev.value - config.landscape.f_star;
                sum.final_dist = s.pr.distance;
              });
  sum.stayed = !sum.exit_time.has_value();
  return sum;
}

ProbeResult supermartingale_probe(const Landscape& landscape, const NeighborhoodSpec& spec,
                                  const Vector& x, const NoiseModel& noise, int batch_size,
                                  double rate, double lipschitz, double sigma_r, long m,
                                  std::uint64_t seed) {
  if (m < 100) throw std::invalid_argument("supermartingale_probe: need at least 100 simulations");
  const ProjectionResult pr = dist_and_project(x, landscape.minima);
  if (pr.distance > spec.radius)
    throw std::invalid_argument("supermartingale_probe: x must lie in the r-neighborhood");
  const Evaluation ev = evaluate_at(landscape, x, pr);

  RngStream rng(seed);
  double mean = 0.0;
  double m2 = 0.0;  // Welford accumulation of dist(x', X)^2
  for (long k = 0; k < m; ++k) {
    const Vector xi = averaged_noise(noise, landscape.dimension, pr.distance, batch_size, rng);
    const Vector next = x - rate * (ev.gradient + xi);
    const double d2 = dist_and_project(next, landscape.minima).distance;
    const double value = d2 * d2;
    const double delta = value - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (value - mean);
  }
  const double variance = m > 1 ? m2 / static_cast<double>(m - 1) : 0.0;

  ProbeResult out;
  out.lhs_estimate = mean;
  out.rhs = (1.0 + lipschitz * lipschitz * rate * rate) * pr.distance * pr.distance -
            2.0 * rate * ev.gradient.dot(x - pr.projection) +
            sigma_r / static_cast<double>(batch_size) * rate * rate;
  out.margin = out.rhs - out.lhs_estimate;
  out.stderr_mean = std::sqrt(variance / static_cast<double>(m));
  return out;
}

}  // namespace sgdlab
