#include "sgdlab/conditions.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sgdlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Slack for pointwise inequality checks, relative to the terms involved.
double pointwise_slack(double lhs, double rhs) {
  return 1e-9 * (1.0 + std::abs(lhs) + std::abs(rhs));
}

struct SampleTerms {
  Vector x;
  double dist;
  double gap;
  double inner;       // (grad, x - x_p)
  double grad_sq;
  Vector grad;
};

SampleTerms sample_terms(const Landscape& l, const Vector& x) {
  const ProjectionResult pr = dist_and_project(x, l.minima);
  const Evaluation ev = evaluate_at(l, x, pr);
  SampleTerms t;
  t.x = x;
  t.dist = pr.distance;
  t.gap = ev.value - l.f_star;
  t.inner = ev.gradient.dot(x - pr.projection);
  t.grad_sq = ev.gradient.squaredNorm();
  t.grad = ev.gradient;
  return t;
}

// Largest c with lhs >= c * rhs at this sample; +inf when the sample does
// not constrain the constant (rhs at the noise floor with lhs admissible).
double attainable_constant(double lhs, double rhs, bool* violated_pointwise) {
  if (rhs > 1e-14) return lhs / rhs;
  if (lhs >= -pointwise_slack(lhs, rhs)) return kInf;
  *violated_pointwise = true;
  return -kInf;
}

const PointSet* single_point(const MinimaSet& set) { return std::get_if<PointSet>(&set); }

}  // namespace

const char* to_string(ConditionKind kind) {
  switch (kind) {
    case ConditionKind::kLrsi: return "LRSI";
    case ConditionKind::kPlStar: return "PL*";
    case ConditionKind::kQgStar: return "QG*";
    case ConditionKind::kStarC: return "*C";
    case ConditionKind::kQc: return "QC";
    case ConditionKind::kWqc: return "WQC";
    case ConditionKind::kNns: return "NNS";
    case ConditionKind::kHcprc: return "HCPRC";
  }
  return "?";
}

double descent_constant(double lipschitz, double grad_sup, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("descent_constant: delta must be positive");
  return 0.5 * lipschitz + grad_sup / delta;
}

std::vector<Vector> sample_neighborhood(const NeighborhoodSpec& spec, long n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_neighborhood: need at least one sample");
  if (!(spec.radius > 0.0)) throw std::invalid_argument("sample_neighborhood: radius must be positive");
  const int d = ambient_dim(spec.minima);

  std::vector<Vector> points;
  points.reserve(n);
  for (long i = 0; i < n; ++i) {
    RngStream rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
    while (true) {
      const Vector z = sample_point_on(spec.minima, d, rng);
      const double t = spec.radius * rng.uniform01();
      const Vector x = z + t * rng.unit_vector(d);
      if (dist_and_project(x, spec.minima).distance <= spec.radius) {
        points.push_back(x);
        break;
      }
    }
  }
  return points;
}

ConditionReport check_condition(const Landscape& landscape, const NeighborhoodSpec& spec,
                                ConditionKind kind, long samples, std::uint64_t seed) {
  if (kind == ConditionKind::kHcprc)
    throw std::invalid_argument("check_condition: HCPRC has its own operation (check_hcprc_rank)");
  const bool needs_star = kind == ConditionKind::kStarC || kind == ConditionKind::kQc;
  const PointSet* star = single_point(landscape.minima);
  if (needs_star && star == nullptr)
    throw std::invalid_argument("check_condition: *C and QC reference a single minimizer x*");
  if (kind == ConditionKind::kNns && !has_support(landscape))
    throw std::invalid_argument("check_condition: NNS needs a registered support function");

  ConditionReport report;
  report.kind = kind;
  report.n_samples = samples;
  report.region = spec;

  const bool ratio_kind = kind == ConditionKind::kLrsi || kind == ConditionKind::kPlStar ||
                          kind == ConditionKind::kQgStar || kind == ConditionKind::kQc ||
                          kind == ConditionKind::kWqc;
  const bool zeta_kind = kind == ConditionKind::kQc || kind == ConditionKind::kWqc;

  double best = kInf;
  std::optional<Vector> worst_point;
  bool pointwise_ok = true;
  std::optional<Vector> pointwise_witness;

  for (const Vector& x : sample_neighborhood(spec, samples, seed)) {
    const SampleTerms t = sample_terms(landscape, x);
    if (ratio_kind) {
      if (t.dist < kDistExclusionBand) continue;
      double lhs = 0.0, rhs = 0.0;
      switch (kind) {
        case ConditionKind::kLrsi: lhs = t.inner; rhs = t.dist * t.dist; break;
        case ConditionKind::kPlStar: lhs = t.grad_sq; rhs = t.gap; break;
        case ConditionKind::kQgStar: lhs = t.gap; rhs = t.dist * t.dist; break;
        case ConditionKind::kQc: lhs = t.grad.dot(x - star->center); rhs = t.gap; break;
        case ConditionKind::kWqc: lhs = t.inner; rhs = t.gap; break;
        default: break;
      }
      bool violated = false;
      const double c = attainable_constant(lhs, rhs, &violated);
      if (violated && !pointwise_witness) {
        pointwise_ok = false;
        pointwise_witness = x;
      }
      if (c < best) {
        best = c;
        worst_point = x;
      }
    } else if (kind == ConditionKind::kStarC) {
      const double lhs = t.grad.dot(x - star->center);
      if (lhs < t.gap - pointwise_slack(lhs, t.gap) && !pointwise_witness) {
        pointwise_ok = false;
        pointwise_witness = x;
      }
    } else {  // NNS
      const ProjectionResult pr = dist_and_project(x, landscape.minima);
      const Evaluation ev = evaluate_at(landscape, x, pr);
      const double h = support_value(landscape, x, ev, pr);
      const double slack = pointwise_slack(t.inner, h);
      if ((t.inner < h - slack || h < -slack) && !pointwise_witness) {
        pointwise_ok = false;
        pointwise_witness = x;
      }
    }
  }

  if (!ratio_kind) {
    report.holds = pointwise_ok;
    report.violation_witness = pointwise_witness;
    return report;
  }

  if (!pointwise_ok) {
    report.holds = false;
    report.violation_witness = pointwise_witness;
    if (std::isfinite(best)) report.best_constant = best;
    return report;
  }

  if (best == kInf) {
    // No sample constrained the constant; the inequality held pointwise.
    report.holds = true;
    if (zeta_kind) report.best_constant = 1.0;
    return report;
  }

  if (zeta_kind) {
    // The admissible quasar range is (0, 1].
    const double zeta = std::min(best, 1.0);
    report.best_constant = zeta;
    report.holds = zeta >= kZetaMin;
  } else {
    report.best_constant = best;
    report.holds = best > kMuFloor;
  }
  if (!report.holds) report.violation_witness = worst_point;
  return report;
}

HcprcReport check_hcprc_rank(const Landscape& landscape, const NeighborhoodSpec& spec,
                             int expected_codim, long n_points, std::uint64_t seed) {
  if (n_points < 1) throw std::invalid_argument("check_hcprc_rank: need at least one point");
  if (expected_codim < 0 || expected_codim > landscape.dimension)
    throw std::invalid_argument("check_hcprc_rank: expected codimension out of range");

  HcprcReport report;
  report.expected_codim = expected_codim;
  report.holds = true;
  for (long i = 0; i < n_points; ++i) {
    RngStream rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
    const Vector z = sample_point_on(landscape.minima, landscape.dimension, rng);
    const Matrix h = hessian_fd(landscape, z, default_hessian_step(z));
    Eigen::JacobiSVD<Matrix> svd(h);
    const Eigen::VectorXd sv = svd.singularValues();
    int rank = 0;
    const double s_max = sv.size() > 0 ? sv[0] : 0.0;
    if (s_max > kHessianZeroFloor) {
      const double cutoff = kRankRelTol * s_max;
      for (int k = 0; k < sv.size(); ++k)
        if (sv[k] > cutoff) ++rank;
    }
    report.points.push_back(z);
    report.singular_values.emplace_back(sv.data(), sv.data() + sv.size());
    report.ranks.push_back(rank);
    if (rank != expected_codim) report.holds = false;
  }
  (void)spec;
  return report;
}

LocalConstants estimate_local_constants(const Landscape& landscape, const NeighborhoodSpec& spec,
                                        double delta, long samples, std::uint64_t seed) {
  if (!(delta > 0.0)) throw std::invalid_argument("estimate_local_constants: delta must be positive");
  if (samples < 2) throw std::invalid_argument("estimate_local_constants: need at least two samples");

  const NeighborhoodSpec outer{spec.radius + delta, spec.minima};
  const std::vector<Vector> pts = sample_neighborhood(outer, samples, mix_seed(seed, 1));
  std::vector<Vector> grads;
  grads.reserve(pts.size());
  for (const auto& x : pts) grads.push_back(evaluate(landscape, x).gradient);

  double lipschitz = 0.0;
  // Random distant pairs plus a short-range perturbation per point; the
  // close pairs are what resolve the local operator norm of the Hessian.
  RngStream pair_rng(mix_seed(seed, 2));
  const long n = static_cast<long>(pts.size());
  const long n_pairs = std::min<long>(100000, n * (n - 1) / 2);
  for (long k = 0; k < n_pairs; ++k) {
    const long i = static_cast<long>(pair_rng.uniform_index(n));
    const long j = static_cast<long>(pair_rng.uniform_index(n));
    if (i == j) continue;
    const double step = (pts[i] - pts[j]).norm();
    if (step < 1e-12) continue;
    lipschitz = std::max(lipschitz, (grads[i] - grads[j]).norm() / step);
  }
  const double eta = 1e-3 * outer.radius;
  for (long i = 0; i < n; ++i) {
    const Vector y = pts[i] + eta * pair_rng.unit_vector(landscape.dimension);
    if (dist_and_project(y, landscape.minima).distance > outer.radius) continue;
    const Vector gy = evaluate(landscape, y).gradient;
    lipschitz = std::max(lipschitz, (gy - grads[i]).norm() / eta);
  }

  double grad_sup = 0.0;
  for (const auto& x : sample_neighborhood(spec, samples, mix_seed(seed, 3)))
    grad_sup = std::max(grad_sup, evaluate(landscape, x).gradient.norm());

  LocalConstants out;
  out.lipschitz = lipschitz;
  out.grad_sup = grad_sup;
  out.descent_constant = descent_constant(lipschitz, grad_sup, delta);
  out.delta = delta;
  return out;
}

ImplicationMatrix implication_matrix(const Landscape& landscape, const NeighborhoodSpec& spec,
                                     long samples, std::uint64_t seed) {
  ImplicationMatrix m;
  const bool is_point = single_point(landscape.minima) != nullptr;

  auto run = [&](ConditionKind kind) -> const ConditionReport& {
    m.reports.push_back(check_condition(landscape, spec, kind, samples, seed));
    return m.reports.back();
  };

  run(ConditionKind::kLrsi);
  run(ConditionKind::kPlStar);
  run(ConditionKind::kQgStar);
  run(ConditionKind::kWqc);
  if (has_support(landscape)) run(ConditionKind::kNns);
  if (is_point) {
    run(ConditionKind::kQc);
    run(ConditionKind::kStarC);
  }
  if (!std::holds_alternative<UnionSet>(landscape.minima)) {
    const int codim = landscape.dimension - intrinsic_dim(landscape.minima, landscape.dimension);
    m.hcprc = check_hcprc_rank(landscape, spec, codim, std::min<long>(samples, 100), mix_seed(seed, 17));
  }

  auto find = [&](ConditionKind kind) -> const ConditionReport* {
    for (const auto& r : m.reports)
      if (r.kind == kind) return &r;
    return nullptr;
  };

  auto assert_implication = [&](ConditionKind premise, ConditionKind conclusion) {
    ImplicationEntry e;
    e.premise = premise;
    e.conclusion = conclusion;
    const ConditionReport* p = find(premise);
    const ConditionReport* c = find(conclusion);
    if (p == nullptr || c == nullptr) {
      e.status = ImplicationEntry::Status::kNotApplicable;
    } else {
      e.premise_holds = p->holds;
      e.conclusion_holds = c->holds;
      e.status = (p->holds && !c->holds) ? ImplicationEntry::Status::kInconsistent
                                         : ImplicationEntry::Status::kConsistent;
      if (e.status == ImplicationEntry::Status::kInconsistent) m.consistent = false;
    }
    m.entries.push_back(e);
  };

  auto record_unconstrained = [&](ConditionKind a, ConditionKind b) {
    ImplicationEntry e;
    e.premise = a;
    e.conclusion = b;
    e.status = ImplicationEntry::Status::kUnconstrained;
    const ConditionReport* pa = find(a);
    const ConditionReport* pb = find(b);
    if (pa) e.premise_holds = pa->holds;
    if (pb) e.conclusion_holds = pb->holds;
    m.entries.push_back(e);
  };

  assert_implication(ConditionKind::kLrsi, ConditionKind::kNns);
  assert_implication(ConditionKind::kWqc, ConditionKind::kNns);
  assert_implication(ConditionKind::kLrsi, ConditionKind::kPlStar);
  assert_implication(ConditionKind::kQc, ConditionKind::kWqc);
  assert_implication(ConditionKind::kStarC, ConditionKind::kQc);
  // Left open: no arrow is asserted either way for these pairs.
  record_unconstrained(ConditionKind::kQgStar, ConditionKind::kLrsi);
  record_unconstrained(ConditionKind::kLrsi, ConditionKind::kWqc);
  return m;
}

double radial_quasar_constant(const Landscape& landscape, const Vector& on_set,
                              const Vector& direction, const std::vector<double>& t_grid) {
  double best = 1.0;
  for (const double t : t_grid) {
    if (!(t > 0.0)) continue;
    const Vector x = on_set + t * direction;
    const Evaluation ev = evaluate(landscape, x);
    const double gap = ev.value - landscape.f_star;
    if (gap <= 1e-14) continue;
    const double slope_term = ev.gradient.dot(direction) * t;
    best = std::min(best, slope_term / gap);
  }
  return std::min(best, 1.0);
}

}  // namespace sgdlab
