#include "sgdlab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace sgdlab {

namespace {

constexpr double kZ99 = 2.5758293035489004;  // standard normal 99.5% quantile

// Static index partition; each worker writes only its own slots, so the
// reduction below is independent of the thread count.
template <typename Fn>
void parallel_for(long n, int threads, const Fn& fn) {
  threads = std::max(1, threads);
  if (threads == 1 || n < 2 * threads) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const long chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const long begin = t * chunk;
    const long end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] {
      for (long i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

std::vector<TrajectorySummary> run_batch(const ExperimentConfig& config, long trials,
                                         long horizon, std::uint64_t master) {
  std::vector<TrajectorySummary> out(trials);
  parallel_for(trials, config.threads, [&](long i) {
    SgdConfig cfg = config.sgd;
    cfg.horizon = horizon;
    cfg.seed = mix_seed(master, static_cast<std::uint64_t>(i));
    out[i] = run_trajectory_summary(cfg);
  });
  return out;
}

void stamp(MCResult& r, const ExperimentConfig& config) {
  r.master_seed = config.sgd.seed;
  r.config_label = config.label;
}

}  // namespace

WilsonInterval wilson99(long successes, long trials) {
  if (trials < 1) throw std::invalid_argument("wilson99: need at least one trial");
  if (successes < 0 || successes > trials) throw std::invalid_argument("wilson99: bad success count");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = kZ99 * kZ99;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = kZ99 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

const char* to_string(Dominance d) {
  switch (d) {
    case Dominance::kDominated: return "yes";
    case Dominance::kViolated: return "no";
    case Dominance::kVacuous: return "vacuous";
    case Dominance::kNoBound: return "-";
  }
  return "?";
}

void validate(const ExperimentConfig& config) {
  validate(config.sgd);
  validate(config.bound_inputs);
  if (config.trials < 100) throw std::invalid_argument("montecarlo: need at least 100 trials");
  const auto& bi = config.bound_inputs;
  if (bi.radius != config.sgd.region.radius)
    throw std::invalid_argument("montecarlo: bound inputs and sgd config disagree on r");
  if (!(bi.schedule == config.sgd.schedule))
    throw std::invalid_argument("montecarlo: bound inputs and sgd config disagree on the schedule");
  if (bi.batch_size != config.sgd.batch_size)
    throw std::invalid_argument("montecarlo: bound inputs and sgd config disagree on the batch size");
  const double dist1 = dist_and_project(config.sgd.x1, config.sgd.region.minima).distance;
  if (std::abs(bi.dist1 - dist1) > 1e-9 * (1.0 + dist1))
    throw std::invalid_argument("montecarlo: bound inputs and sgd config disagree on dist(x_1, X)");
}

MCResult estimate_stability(const ExperimentConfig& config) {
  validate(config);
  const auto summaries = run_batch(config, config.trials, config.sgd.horizon, config.sgd.seed);
  long stayed = 0;
  for (const auto& s : summaries) stayed += s.stayed ? 1 : 0;

  BoundInputs bi = config.bound_inputs;
  bi.horizon = config.sgd.horizon;
  const BoundReport bound = compute_cn(bi);

  MCResult r;
  r.event_name = "stability";
  r.empirical_p = static_cast<double>(stayed) / static_cast<double>(config.trials);
  const WilsonInterval ci = wilson99(stayed, config.trials);
  r.ci_low = ci.low;
  r.ci_high = ci.high;
  r.theoretical_bound = bound.stability_lower_bound;
  if (bound.vacuous) {
    r.dominated = Dominance::kVacuous;
  } else {
    const double allowance = 0.5 * (ci.high - ci.low);
    r.dominated = r.empirical_p >= bound.stability_lower_bound - allowance
                      ? Dominance::kDominated
                      : Dominance::kViolated;
  }
  stamp(r, config);
  return r;
}

std::vector<MCResult> estimate_concentration(const ExperimentConfig& config) {
  validate(config);
  if (config.epsilon_grid.empty())
    throw std::invalid_argument("estimate_concentration: epsilon grid must be non-empty");

  const auto summaries = run_batch(config, config.trials, config.sgd.horizon, config.sgd.seed);
  std::vector<MCResult> results;
  for (const double eps : config.epsilon_grid) {
    if (!(eps > 0.0)) throw std::invalid_argument("estimate_concentration: epsilon must be positive");
    long min_h_above = 0;
    long final_gap_above = 0;
    for (const auto& s : summaries) {
      if (s.min_h > eps) ++min_h_above;
      if (s.final_gap > eps) ++final_gap_above;
    }

    MCResult min_h;
    min_h.event_name = "min_h_gt_eps";
    min_h.epsilon = eps;
    min_h.empirical_p = static_cast<double>(min_h_above) / static_cast<double>(config.trials);
    WilsonInterval ci = wilson99(min_h_above, config.trials);
    min_h.ci_low = ci.low;
    min_h.ci_high = ci.high;
    const double rhs = concentration_rhs(config.bound_inputs, eps, config.sgd.horizon);
    min_h.theoretical_bound = rhs;
    if (rhs >= 1.0) {
      min_h.dominated = Dominance::kVacuous;
    } else {
      const double allowance = 0.5 * (ci.high - ci.low);
      min_h.dominated =
          min_h.empirical_p <= rhs + allowance ? Dominance::kDominated : Dominance::kViolated;
    }
    stamp(min_h, config);
    results.push_back(std::move(min_h));

    // Only the decay exponent is contracted for the last-iterate gap; the
    // empirical value is reported without an absolute bound.
    MCResult gap;
    gap.event_name = "final_gap_gt_eps";
    gap.epsilon = eps;
    gap.empirical_p = static_cast<double>(final_gap_above) / static_cast<double>(config.trials);
    ci = wilson99(final_gap_above, config.trials);
    gap.ci_low = ci.low;
    gap.ci_high = ci.high;
    gap.dominated = Dominance::kNoBound;
    stamp(gap, config);
    results.push_back(std::move(gap));
  }
  return results;
}

RateFit fit_rate_slope(const ExperimentConfig& config, const std::vector<long>& horizons) {
  validate(config);
  if (horizons.size() < 4) throw std::invalid_argument("fit_rate_slope: need at least 4 horizons");
  if (!std::is_sorted(horizons.begin(), horizons.end()))
    throw std::invalid_argument("fit_rate_slope: horizons must be ascending");
  const double span = std::log10(static_cast<double>(horizons.back()) /
                                 static_cast<double>(horizons.front()));
  if (span < 1.5 - 1e-9)
    throw std::invalid_argument("fit_rate_slope: horizons must span at least 1.5 decades");

  RateFit fit;
  fit.horizons = horizons;
  for (std::size_t k = 0; k < horizons.size(); ++k) {
    const std::uint64_t horizon_master = mix_seed(config.sgd.seed, 1000003ull + k);
    const auto summaries = run_batch(config, config.trials, horizons[k], horizon_master);
    long stayed = 0;
    double gap_sum = 0.0;
    for (const auto& s : summaries) {
      if (!s.stayed) continue;
      ++stayed;
      gap_sum += s.final_gap;
    }
    const double frac = static_cast<double>(stayed) / static_cast<double>(config.trials);
    if (frac < 0.5)
      throw std::runtime_error("fit_rate_slope: fewer than half the trajectories stayed; "
                               "conditioning would be too lossy");
    fit.stayed_fraction.push_back(frac);
    fit.means.push_back(gap_sum / static_cast<double>(stayed));
  }

  // Least squares of log(mean) on log(N).
  const std::size_t k = horizons.size();
  double mx = 0.0, my = 0.0;
  std::vector<double> xs(k), ys(k);
  for (std::size_t i = 0; i < k; ++i) {
    xs[i] = std::log(static_cast<double>(horizons[i]));
    ys[i] = std::log(fit.means[i]);
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  fit.slope = sxy / sxx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double resid = ys[i] - my - fit.slope * (xs[i] - mx);
    ss_res += resid * resid;
  }
  fit.stderr_slope = k > 2 ? std::sqrt(ss_res / static_cast<double>(k - 2) / sxx) : 0.0;
  return fit;
}

ComparisonSummary compare_to_bounds(const std::vector<MCResult>& results) {
  ComparisonSummary summary;
  for (const auto& r : results) {
    switch (r.dominated) {
      case Dominance::kDominated: ++summary.dominated; break;
      case Dominance::kViolated:
        ++summary.violated;
        summary.failures.push_back(r);
        break;
      case Dominance::kVacuous: ++summary.vacuous; break;
      case Dominance::kNoBound: ++summary.unbounded; break;
    }
  }
  return summary;
}

}  // namespace sgdlab
