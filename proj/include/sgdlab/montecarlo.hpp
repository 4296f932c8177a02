#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sgdlab/bounds.hpp"
#include "sgdlab/sgd.hpp"

namespace sgdlab {

// Empirical estimates of the probabilities the theorems bound, with Wilson
// confidence intervals and a dominance verdict against the theoretical
// side. Per-trajectory seeds are derived from the master seed and the
// trajectory index, so results do not depend on the worker count.

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

/// 99% Wilson score interval; valid near frequencies 0 and 1.
WilsonInterval wilson99(long successes, long trials);

enum class Dominance {
  kDominated,  // the non-vacuous bound dominates the estimate within allowance
  kViolated,
  kVacuous,    // the bound carries no information (e.g. C_N >= 1)
  kNoBound,    // only an exponent is contracted; no absolute bound exists
};

const char* to_string(Dominance d);

struct MCResult {
  std::string event_name;
  std::optional<double> epsilon;
  double empirical_p = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  std::optional<double> theoretical_bound;
  Dominance dominated = Dominance::kNoBound;
  std::uint64_t master_seed = 0;
  std::string config_label;
};

struct ExperimentConfig {
  SgdConfig sgd;
  long trials = 10000;
  std::vector<double> epsilon_grid;
  BoundInputs bound_inputs;
  int threads = 1;
  std::string label;  // stamped into results for reproduction
};

/// Checks trials >= 100 and that bound_inputs agree with the sgd config
/// (same r, schedule, batch size and dist(x_1, X)).
void validate(const ExperimentConfig& config);

/// Fraction of trajectories that never leave N_r(X), against 1 - C_N. The
/// bound dominates when empirical >= (1 - C_N) - CI half-width.
MCResult estimate_stability(const ExperimentConfig& config);

/// Per epsilon, the frequency of min_{n<=N} h(x_n) > eps (against the
/// explicit concentration bound) and of f(x_N) - f_star > eps (exponent
/// only, no absolute bound). Throws for an empty epsilon grid.
std::vector<MCResult> estimate_concentration(const ExperimentConfig& config);

struct RateFit {
  std::vector<long> horizons;
  std::vector<double> means;  // conditioned mean gap per horizon
  std::vector<double> stayed_fraction;
  double slope = 0.0;  // log-log least squares
  double stderr_slope = 0.0;
};

/// Mean of f(x_N) - f_star over stayed trajectories at each horizon and the
/// fitted log-log slope. Requires >= 4 horizons spanning >= 1.5 decades;
/// refuses when any horizon keeps fewer than half its trajectories.
RateFit fit_rate_slope(const ExperimentConfig& config, const std::vector<long>& horizons);

struct ComparisonSummary {
  long dominated = 0;
  long violated = 0;
  long vacuous = 0;
  long unbounded = 0;
  std::vector<MCResult> failures;  // full context for reproduction
};

ComparisonSummary compare_to_bounds(const std::vector<MCResult>& results);

}  // namespace sgdlab
