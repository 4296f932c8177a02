#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sgdlab/landscape.hpp"
#include "sgdlab/minima_set.hpp"
#include "sgdlab/types.hpp"

namespace sgdlab {

// Local convexity conditions over a sampled r-neighborhood of the minima
// set, with x_p the metric projection and gap = f(x) - f_star:
//
//   LRSI   (grad, x - x_p)  >= mu * |x - x_p|^2
//   PL*    |grad|^2         >= mu * gap
//   QG*    gap              >= mu * |x - x_p|^2
//   *C     (grad, x - x*)   >= gap              (single minimizer x*)
//   QC     (grad, x - x*)   >= zeta * gap       (single minimizer x*)
//   WQC    (grad, x - x_p)  >= zeta * gap
//   NNS    (grad, x - x_p)  >= h(x) >= 0        (registered support h)
//   HCPRC  rank of the Hessian equals d - dim(X) on the minima manifold
enum class ConditionKind { kLrsi, kPlStar, kQgStar, kStarC, kQc, kWqc, kNns, kHcprc };

const char* to_string(ConditionKind kind);

// Certification floors. mu-type constants must exceed kMuFloor and quasar
// constants kZetaMin (the admissible range is (0, 1]) before a condition is
// declared to hold; both sit above the sampling noise floor. Ratio
// constants skip points closer to X than kDistExclusionBand.
inline constexpr double kMuFloor = 1e-3;
inline constexpr double kZetaMin = 1e-3;
inline constexpr double kDistExclusionBand = 1e-8;
// Hessian rank: singular values above kRankRelTol * s_max count; a Hessian
// with s_max below kHessianZeroFloor is numerically zero (rank 0).
inline constexpr double kRankRelTol = 1e-6;
inline constexpr double kHessianZeroFloor = 1e-5;

struct ConditionReport {
  ConditionKind kind = ConditionKind::kLrsi;
  bool holds = false;
  // mu for LRSI / PL* / QG*, zeta for QC / WQC; absent for the pointwise
  // kinds (*C, NNS) and when no sample constrains the constant.
  std::optional<double> best_constant;
  std::optional<Vector> violation_witness;
  long n_samples = 0;
  NeighborhoodSpec region;
};

struct LocalConstants {
  double lipschitz = 0.0;         // pairwise gradient Lipschitz estimate over N_{r+delta}
  double grad_sup = 0.0;          // max sampled |grad f| over N_r
  double descent_constant = 0.0;  // lipschitz / 2 + grad_sup / delta
  double delta = 0.0;
};

/// lipschitz/2 + grad_sup/delta; throws for delta <= 0.
double descent_constant(double lipschitz, double grad_sup, double delta);

/// n points with dist(x, X) <= r: a point z uniform on X, a radial offset
/// uniform on [0, r], a uniform direction. Deterministic given the seed and
/// independent of how the index range is split across workers.
std::vector<Vector> sample_neighborhood(const NeighborhoodSpec& spec, long n, std::uint64_t seed);

/// Certifies one condition by sampling. Throws std::invalid_argument for
/// HCPRC (which has its own operation), for *C/QC on a non-point minima
/// set, and for NNS when the landscape registers no support function.
ConditionReport check_condition(const Landscape& landscape, const NeighborhoodSpec& spec,
                                ConditionKind kind, long samples, std::uint64_t seed);

struct HcprcReport {
  bool holds = false;
  int expected_codim = 0;
  std::vector<Vector> points;                       // sampled on X
  std::vector<std::vector<double>> singular_values; // per point, descending
  std::vector<int> ranks;
};

/// Finite-difference Hessian rank at points sampled on X. holds is true iff
/// the rank equals expected_codim at every sampled point.
HcprcReport check_hcprc_rank(const Landscape& landscape, const NeighborhoodSpec& spec,
                             int expected_codim, long n_points, std::uint64_t seed);

/// Pairwise Lipschitz estimate over N_{r+delta} (a lower bound on the true
/// constant), the gradient sup over N_r, and the assembled descent constant.
LocalConstants estimate_local_constants(const Landscape& landscape, const NeighborhoodSpec& spec,
                                        double delta, long samples, std::uint64_t seed);

/// Safety factor applied to the pairwise Lipschitz estimate before it feeds
/// the stability bounds (the raw estimate errs low, which would make the
/// theoretical bound spuriously tight).
inline constexpr double kLipschitzSafety = 1.1;

struct ImplicationEntry {
  enum class Status { kConsistent, kInconsistent, kUnconstrained, kNotApplicable };
  ConditionKind premise;
  ConditionKind conclusion;
  Status status = Status::kNotApplicable;
  bool premise_holds = false;
  bool conclusion_holds = false;
};

struct ImplicationMatrix {
  std::vector<ConditionReport> reports;
  std::optional<HcprcReport> hcprc;
  std::vector<ImplicationEntry> entries;
  bool consistent = true;  // no sampled counterexample to an asserted implication
};

/// Runs every applicable check and verifies the asserted implications
/// LRSI => NNS, WQC => NNS, LRSI => PL*, QC => WQC and *C => QC (the last
/// two only when X is a single point). The QG*/LRSI and LRSI/WQC pairs are
/// recorded as unconstrained. An inconsistency indicates a checker bug.
ImplicationMatrix implication_matrix(const Landscape& landscape, const NeighborhoodSpec& spec,
                                     long samples, std::uint64_t seed);

/// Smallest attainable quasar constant along the 1-d slice t -> f(z + t*v),
/// clipped to the admissible (0, 1]: min over the grid of f'(t) * t / gap.
double radial_quasar_constant(const Landscape& landscape, const Vector& on_set, const Vector& direction,
                              const std::vector<double>& t_grid);

}  // namespace sgdlab
