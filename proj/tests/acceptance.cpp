// Acceptance suite: one pass/fail line per criterion, exit 0 only if all
// criteria pass. Tolerances are pinned in code next to each criterion.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sgdlab/conditions.hpp"
#include "sgdlab/experiment.hpp"
#include "sgdlab/montecarlo.hpp"

using namespace sgdlab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Vector vec2(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}

Landscape circle_basin(double degree) {
  LandscapeSpec spec;
  spec.family = LandscapeSpec::Family::kPowerBasin;
  spec.degree = degree;
  spec.dimension = 2;
  spec.minima = SphereSet{Vector::Zero(2), 1.0};
  return make_landscape(spec);
}

// The gradient Lipschitz constant of (|x| - 1)^2 on the annulus
// 0.5 <= |x| <= 1.5 is exactly 2 (attained at the inner edge).
constexpr double kCircleLipschitz = 2.0;
constexpr double kRadius = 0.5;

ExperimentConfig stability_config(double dist1, double sigma, long horizon, long trials,
                                  std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.sgd.landscape = circle_basin(2.0);
  cfg.sgd.region = NeighborhoodSpec{kRadius, cfg.sgd.landscape.minima};
  cfg.sgd.schedule = Schedule::decreasing(0.1, 0.7);
  cfg.sgd.noise = GaussianNoise{sigma};
  cfg.sgd.horizon = horizon;
  cfg.sgd.x1 = vec2(1.0 + dist1, 0.0);
  cfg.sgd.seed = seed;
  cfg.trials = trials;
  cfg.label = "acceptance";

  BoundInputs bi;
  bi.dist1 = dist1;
  bi.radius = kRadius;
  bi.lipschitz = kCircleLipschitz;
  bi.sigma_r = sigma * sigma * 2.0;
  bi.batch_size = 1;
  bi.schedule = cfg.sgd.schedule;
  bi.horizon = horizon;
  cfg.bound_inputs = bi;
  return cfg;
}

// The five-configuration grid shared by criteria 1 and 2: stability-failure
// bounds C_N spread across [0.05, 0.8].
std::vector<ExperimentConfig> stability_grid() {
  return {
      stability_config(0.11, 0.02, 1000, 10000, 101),
      stability_config(0.20, 0.05, 1000, 10000, 102),
      stability_config(0.30, 0.10, 1000, 10000, 103),
      stability_config(0.35, 0.15, 1000, 10000, 104),
      stability_config(0.40, 0.20, 1000, 10000, 105),
  };
}

Outcome criterion1_stability_dominance() {
  const auto started = std::chrono::steady_clock::now();
  Outcome out;
  out.pass = true;
  std::ostringstream detail;
  int idx = 0;
  for (const auto& cfg : stability_grid()) {
    BoundInputs bi = cfg.bound_inputs;
    const double cn = compute_cn(bi).cn;
    if (cn < 0.05 || cn > 0.8) {
      out.pass = false;
      detail << " cfg" << idx << " C_N=" << cn << " outside [0.05,0.8];";
    }
    const MCResult r = estimate_stability(cfg);
    detail << " cfg" << idx << ": C_N=" << cn << " empirical=" << r.empirical_p
           << " bound=" << *r.theoretical_bound << " " << to_string(r.dominated) << ";";
    if (r.dominated != Dominance::kDominated) out.pass = false;
    ++idx;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  detail << " runtime=" << seconds << "s";
  if (seconds > 300.0) out.pass = false;
  out.detail = detail.str();
  return out;
}

Outcome criterion2_concentration_dominance() {
  Outcome out;
  out.pass = true;
  std::ostringstream detail;
  long non_vacuous = 0;
  int idx = 0;
  for (auto cfg : stability_grid()) {
    cfg.epsilon_grid = {1e-2, 1e-3};
    for (const auto& r : estimate_concentration(cfg)) {
      if (r.event_name != "min_h_gt_eps") continue;
      if (r.dominated == Dominance::kVacuous) continue;
      ++non_vacuous;
      detail << " cfg" << idx << " eps=" << *r.epsilon << " empirical=" << r.empirical_p
             << " rhs=" << *r.theoretical_bound << " " << to_string(r.dominated) << ";";
      if (r.dominated != Dominance::kDominated) out.pass = false;
    }
    ++idx;
  }
  detail << " non_vacuous_cases=" << non_vacuous;
  if (non_vacuous == 0) out.pass = false;  // the criterion must actually bite
  out.detail = detail.str();
  return out;
}

ExperimentConfig rate_config(double degree, double beta, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.sgd.landscape = circle_basin(degree);
  cfg.sgd.region = NeighborhoodSpec{kRadius, cfg.sgd.landscape.minima};
  cfg.sgd.schedule = Schedule::decreasing(0.3, beta);
  cfg.sgd.noise = GaussianNoise{0.1};
  cfg.sgd.horizon = 100;
  cfg.sgd.x1 = vec2(1.05, 0.0);
  cfg.sgd.seed = seed;
  cfg.trials = 1000;
  cfg.label = "acceptance";

  BoundInputs bi;
  bi.dist1 = 0.05;
  bi.radius = kRadius;
  bi.lipschitz = kCircleLipschitz;
  bi.sigma_r = 0.1 * 0.1 * 2.0;
  bi.batch_size = 1;
  bi.schedule = cfg.sgd.schedule;
  bi.horizon = cfg.sgd.horizon;
  cfg.bound_inputs = bi;
  return cfg;
}

const std::vector<long> kRateHorizons{100, 316, 1000, 3162, 10000};

Outcome criterion3_rate_exponents() {
  Outcome out;
  out.pass = true;
  std::ostringstream detail;
  for (const double beta : {0.6, 0.8}) {
    const RateFit fit = fit_rate_slope(rate_config(2.0, beta, 301), kRateHorizons);
    detail << " beta=" << beta << " slope=" << fit.slope << " (target " << -beta << "+-0.15);";
    if (std::abs(fit.slope + beta) > 0.15) out.pass = false;
  }
  out.detail = detail.str();
  return out;
}

Outcome criterion4_flat_basin_slowdown() {
  Outcome out;
  const RateFit q2 = fit_rate_slope(rate_config(2.0, 0.6, 301), kRateHorizons);
  const RateFit q4 = fit_rate_slope(rate_config(4.0, 0.6, 302), kRateHorizons);
  // Shallower by at least 0.1: the flat-basin slope sits closer to zero.
  out.pass = q4.slope >= q2.slope + 0.1;
  std::ostringstream detail;
  detail << " q2 slope=" << q2.slope << " q4 slope=" << q4.slope;
  out.detail = detail.str();
  return out;
}

Outcome criterion5_condition_classification() {
  Outcome out;
  out.pass = true;
  std::ostringstream detail;

  const Landscape flat = circle_basin(4.0);
  const NeighborhoodSpec spec{kRadius, flat.minima};
  const ConditionReport wqc = check_condition(flat, spec, ConditionKind::kWqc, 20000, 501);
  const ConditionReport nns = check_condition(flat, spec, ConditionKind::kNns, 20000, 501);
  const ConditionReport pl = check_condition(flat, spec, ConditionKind::kPlStar, 20000, 501);
  const ConditionReport qg = check_condition(flat, spec, ConditionKind::kQgStar, 20000, 501);
  if (!wqc.holds || !wqc.best_constant || *wqc.best_constant < 0.9) out.pass = false;
  if (!nns.holds) out.pass = false;
  if (pl.holds || qg.holds) out.pass = false;
  detail << " q4: WQC=" << wqc.holds << " zeta=" << (wqc.best_constant ? *wqc.best_constant : -1.0)
         << " NNS=" << nns.holds << " PL*=" << pl.holds << " QG*=" << qg.holds << ";";

  const Landscape quad = circle_basin(2.0);
  const NeighborhoodSpec qspec{kRadius, quad.minima};
  const ConditionReport lrsi = check_condition(quad, qspec, ConditionKind::kLrsi, 20000, 502);
  if (!lrsi.holds || !lrsi.best_constant || std::abs(*lrsi.best_constant - 2.0) > 0.05 * 2.0)
    out.pass = false;
  const HcprcReport rank = check_hcprc_rank(quad, qspec, 1, 100, 503);
  if (!rank.holds) out.pass = false;
  detail << " q2: LRSI constant=" << (lrsi.best_constant ? *lrsi.best_constant : -1.0)
         << " HCPRC=" << rank.holds << " at " << rank.ranks.size() << " points";
  out.detail = detail.str();
  return out;
}

Outcome criterion6_projection_properties() {
  Outcome out;
  out.pass = true;
  std::ostringstream detail;

  std::vector<MinimaSet> sets;
  sets.push_back(SphereSet{Vector::Zero(2), 1.0});
  sets.push_back(SegmentSet{vec2(-1.0, 0.0), vec2(1.0, 0.5)});
  {
    UnionSet u;
    u.components.push_back(SegmentSet{vec2(-1.0, -0.25), vec2(1.0, -0.25)});
    u.components.push_back(SegmentSet{vec2(-1.0, 0.25), vec2(1.0, 0.25)});
    sets.push_back(u);
  }

  long cases = 0;
  long failures = 0;
  RngStream rng(601);
  while (cases < 10000) {
    const MinimaSet& set = sets[cases % sets.size()];
    const Vector x = 2.5 * rng.gaussian(2);
    const ProjectionResult px = dist_and_project(x, set);
    if (px.distance < 1e-9) continue;
    const double t = rng.uniform01();
    if (t < 1e-6 || t > 1.0 - 1e-6) continue;
    ++cases;
    const Vector y = (1.0 - t) * px.projection + t * x;
    const ProjectionResult py = dist_and_project(y, set);
    if (!py.unique || (py.projection - px.projection).norm() > 1e-9) ++failures;
  }
  detail << " betweenness failures=" << failures << "/" << cases << ";";
  if (failures != 0) out.pass = false;

  const ProjectionResult center = dist_and_project(vec2(0.0, 0.0), sets[0]);
  if (center.unique) out.pass = false;
  const ProjectionResult midline = dist_and_project(vec2(0.2, 0.0), sets[2]);
  if (midline.unique) out.pass = false;
  detail << " sphere-center flagged=" << !center.unique
         << " segment-midline flagged=" << !midline.unique;
  out.detail = detail.str();
  return out;
}

Outcome criterion7_supermartingale_probe() {
  Outcome out;
  out.pass = true;
  const Landscape l = circle_basin(2.0);
  const NeighborhoodSpec spec{kRadius, l.minima};
  const GaussianNoise noise{0.1};
  const double sigma_r = 0.1 * 0.1 * 2.0;
  const double rate = 0.05;

  RngStream rng(701);
  double worst = 1e300;
  int violations = 0;
  for (int k = 0; k < 100; ++k) {
    const Vector z = sample_point_on(l.minima, 2, rng);
    const Vector x = z + (kRadius * rng.uniform01()) * rng.unit_vector(2);
    const ProbeResult probe = supermartingale_probe(l, spec, x, noise, 1, rate, kCircleLipschitz,
                                                    sigma_r, 100000, 702 + k);
    const double slack = probe.margin + 3.0 * probe.stderr_mean;
    worst = std::min(worst, slack);
    if (slack < 0.0) ++violations;
  }
  out.pass = violations == 0;
  std::ostringstream detail;
  detail << " states=100 m=100000 violations=" << violations << " worst margin+3se=" << worst;
  out.detail = detail.str();
  return out;
}

Outcome criterion8_corollary_chain() {
  Outcome out;
  out.pass = true;
  std::ostringstream detail;

  long accepted = 0;
  for (const double beta : {0.55, 0.6, 0.7, 0.8, 0.9, 1.0}) {
    for (const double lipschitz : {0.5, 2.0, 5.0}) {
      BoundInputs bi;
      bi.dist1 = 0.2;
      bi.radius = kRadius;
      bi.lipschitz = lipschitz;
      bi.sigma_r = 0.02;
      bi.batch_size = 1;
      bi.schedule = Schedule::decreasing(0.01, beta);
      const double max_a = check_decreasing_lr_bound(bi).max_a;
      if (!(max_a > 0.0)) {
        out.pass = false;
        continue;
      }
      for (const double frac : {0.25, 0.5, 0.9, 0.99}) {
        BoundInputs probe = bi;
        probe.schedule = Schedule::decreasing(frac * max_a, beta);
        if (!check_decreasing_lr_bound(probe).holds) continue;
        ++accepted;
        const double c_inf = compute_cn(probe).cn;
        if (!(c_inf < 1.0)) {
          out.pass = false;
          detail << " C_inf=" << c_inf << " at beta=" << beta << " L=" << lipschitz
                 << " a=" << frac * max_a << ";";
        }
      }
    }
  }
  detail << " accepted=" << accepted << ";";

  double previous = 0.0;
  for (const double r : {0.3, 0.4, 0.5, 0.6, 0.7}) {
    BoundInputs bi;
    bi.dist1 = 0.1;
    bi.radius = r;
    bi.lipschitz = 2.0;
    bi.sigma_r = 0.02;
    bi.batch_size = 1;
    bi.schedule = Schedule::decreasing(0.01, 0.7);
    const double max_a = check_decreasing_lr_bound(bi).max_a;
    detail << " max_a(r=" << r << ")=" << max_a;
    if (max_a < previous - 1e-12) out.pass = false;
    previous = max_a;
  }
  out.detail = detail.str();
  return out;
}

Outcome criterion9_cross_formula_consistency() {
  Outcome out;
  out.pass = true;
  double worst = 0.0;
  for (const long n : {1L, 2L, 10L, 100L, 1000L, 10000L}) {
    for (const double a : {0.001, 0.01, 0.1}) {
      for (const double lipschitz : {0.5, 2.0}) {
        BoundInputs bi;
        bi.dist1 = 0.1;
        bi.radius = kRadius;
        bi.lipschitz = lipschitz;
        bi.sigma_r = 0.01;
        bi.batch_size = 10;
        bi.schedule = Schedule::constant(a);
        bi.horizon = n;
        const double direct = compute_cn(bi).cn * kRadius * kRadius;
        const double geometric = check_constant_lr_bound(bi).lhs;
        const double rel = std::abs(direct - geometric) / std::max(geometric, 1e-300);
        worst = std::max(worst, rel);
        if (rel > 1e-10) out.pass = false;
      }
    }
  }
  std::ostringstream detail;
  detail << " worst relative deviation=" << worst;
  out.detail = detail.str();
  return out;
}

Outcome criterion10_determinism() {
  Outcome out;
  const fs::path config = fs::path(SGDLAB_CONFIG_DIR) / "reference_suite.json";
  const fs::path base =
      fs::temp_directory_path() / ("sgdlab_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(base);
  fs::create_directories(base);

  auto run_into = [&](const fs::path& dir) {
    RunOptions options;
    options.threads = 1;
    options.out_override = dir.string();
    std::ostringstream sink;
    return run_simulate(config, options, sink);
  };
  const int rc1 = run_into(base / "a");
  const int rc2 = run_into(base / "b");

  out.pass = rc1 == kExitOk && rc2 == kExitOk;
  long files = 0;
  std::ostringstream detail;
  if (out.pass) {
    for (const auto& entry : fs::directory_iterator(base / "a")) {
      ++files;
      std::ifstream fa(entry.path(), std::ios::binary);
      std::ifstream fb(base / "b" / entry.path().filename(), std::ios::binary);
      std::ostringstream sa, sb;
      sa << fa.rdbuf();
      sb << fb.rdbuf();
      if (sa.str().empty() || sa.str() != sb.str()) {
        out.pass = false;
        detail << " mismatch in " << entry.path().filename().string() << ";";
      }
    }
    if (files == 0) out.pass = false;
  } else {
    detail << " suite exit codes " << rc1 << "/" << rc2 << ";";
  }
  detail << " files compared=" << files;
  out.detail = detail.str();
  std::error_code ec;
  fs::remove_all(base, ec);
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "stability dominance on the q=2 circle grid", criterion1_stability_dominance},
      {2, "explicit concentration dominance", criterion2_concentration_dominance},
      {3, "rate exponents for beta in {0.6, 0.8}", criterion3_rate_exponents},
      {4, "flat-basin slowdown", criterion4_flat_basin_slowdown},
      {5, "condition classification", criterion5_condition_classification},
      {6, "projection properties", criterion6_projection_properties},
      {7, "one-step supermartingale probe", criterion7_supermartingale_probe},
      {8, "corollary chain and max_a monotonicity", criterion8_corollary_chain},
      {9, "cross-formula consistency", criterion9_cross_formula_consistency},
      {10, "reference suite determinism", criterion10_determinism},
  };

  bool all_pass = true;
  for (const auto& criterion : criteria) {
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string(" exception: ") + e.what();
    }
    all_pass = all_pass && outcome.pass;
    std::printf("%s criterion %<no value>d: %s —%s\n", outcome.pass ? "PASS" : "FAIL",
                criterion.number, criterion.name, outcome.detail.c_str());
  }
  return all_pass ? 0 : 1;
}
