#include "sgdlab/minima_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sgdlab {

namespace {

constexpr double kTieTol = 1e-12;

bool lex_less(const Vector& a, const Vector& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

ProjectionResult project_point(const Vector& x, const PointSet& s) {
  return {(x - s.center).norm(), s.center, true};
}

ProjectionResult project_sphere(const Vector& x, const SphereSet& s) {
  const Vector diff = x - s.center;
  const double rho = diff.norm();
  if (rho <= kTieTol * (1.0 + s.radius)) {
    // At the center every direction is nearest; canonical pick along e_1.
    Vector proj = s.center;
    proj[0] += s.radius;
    return {s.radius, proj, false};
  }
  Vector proj = s.center + (s.radius / rho) * diff;
  return {std::abs(rho - s.radius), proj, true};
}

ProjectionResult project_segment(const Vector& x, const SegmentSet& s) {
  const Vector dir = s.b - s.a;
  const double len2 = dir.squaredNorm();
  double t = len2 > 0.0 ? (x - s.a).dot(dir) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  Vector proj = s.a + t * dir;
  return {(x - proj).norm(), proj, true};  // segments are convex
}

ProjectionResult project_union(const Vector& x, const UnionSet& s) {
  std::vector<ProjectionResult> results;
  results.reserve(s.components.size());
  double best = std::numeric_limits<double>::infinity();
  for (const auto& comp : s.components) {
    results.push_back(dist_and_project(x, comp));
    best = std::min(best, results.back().distance);
  }
  const double tol = kTieTol * (1.0 + best);
  // Gather candidates from all components tied for the minimum distance.
  std::vector<const ProjectionResult*> tied;
  for (const auto& r : results)
    if (r.distance <= best + tol) tied.push_back(&r);

  const ProjectionResult* canonical = tied.front();
  bool unique = canonical->unique;
  bool distinct = false;
  for (const auto* r : tied) {
    if ((r->projection - canonical->projection).norm() > tol * (1.0 + canonical->projection.norm()))
      distinct = true;
    if (!r->unique) unique = false;
    if (lex_less(r->projection, canonical->projection)) canonical = r;
  }
  if (distinct) unique = false;
  return {best, canonical->projection, unique};
}

double set_gap(const MinimaSet& a, const MinimaSet& b, int dim);

// Deterministic probe points used to approximate distances between
// components when computing the reach hint.
std::vector<Vector> probe_points(const MinimaSet& set, int dim) {
  std::vector<Vector> pts;
  RngStream rng(0xC0FFEEull);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointSet>) {
          pts.push_back(s.center);
        } else if constexpr (std::is_same_v<T, SphereSet>) {
          for (int k = 0; k < 64; ++k) pts.push_back(s.center + s.radius * rng.unit_vector(dim));
        } else if constexpr (std::is_same_v<T, SegmentSet>) {
          for (int k = 0; k <= 16; ++k) pts.push_back(s.a + (k / 16.0) * (s.b - s.a));
        } else {
          for (const auto& comp : s.components) {
            auto sub = probe_points(comp, dim);
            pts.insert(pts.end(), sub.begin(), sub.end());
          }
        }
      },
      set);
  return pts;
}

double set_gap(const MinimaSet& a, const MinimaSet& b, int dim) {
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& p : probe_points(a, dim)) gap = std::min(gap, dist_and_project(p, b).distance);
  for (const auto& p : probe_points(b, dim)) gap = std::min(gap, dist_and_project(p, a).distance);
  return gap;
}

}  // namespace

int ambient_dim(const MinimaSet& set) {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointSet>) return static_cast<int>(s.center.size());
        if constexpr (std::is_same_v<T, SphereSet>) return static_cast<int>(s.center.size());
        if constexpr (std::is_same_v<T, SegmentSet>) return static_cast<int>(s.a.size());
        if constexpr (std::is_same_v<T, UnionSet>)
          return s.components.empty() ? 0 : ambient_dim(s.components.front());
      },
      set);
}

ProjectionResult dist_and_project(const Vector& x, const MinimaSet& set) {
  if (!x.allFinite()) throw std::domain_error("dist_and_project: non-finite input point");
  return std::visit(
      [&](const auto& s) -> ProjectionResult {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointSet>) return project_point(x, s);
        if constexpr (std::is_same_v<T, SphereSet>) return project_sphere(x, s);
        if constexpr (std::is_same_v<T, SegmentSet>) return project_segment(x, s);
        if constexpr (std::is_same_v<T, UnionSet>) return project_union(x, s);
      },
      set);
}

void validate(const MinimaSet& set, int dimension) {
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointSet>) {
          if (s.center.size() != dimension) throw std::invalid_argument("minima set: point dimension mismatch");
          if (!s.center.allFinite()) throw std::invalid_argument("minima set: non-finite point");
        } else if constexpr (std::is_same_v<T, SphereSet>) {
          if (s.center.size() != dimension) throw std::invalid_argument("minima set: sphere dimension mismatch");
          if (!s.center.allFinite()) throw std::invalid_argument("minima set: non-finite sphere center");
          if (!(s.radius > 0.0) || !std::isfinite(s.radius))
            throw std::invalid_argument("minima set: sphere radius must be positive");
          if (dimension < 2) throw std::invalid_argument("minima set: sphere requires dimension >= 2");
        } else if constexpr (std::is_same_v<T, SegmentSet>) {
          if (s.a.size() != dimension || s.b.size() != dimension)
            throw std::invalid_argument("minima set: segment dimension mismatch");
          if (!s.a.allFinite() || !s.b.allFinite())
            throw std::invalid_argument("minima set: non-finite segment endpoint");
        } else {
          if (s.components.empty()) throw std::invalid_argument("minima set: empty union");
          for (const auto& comp : s.components) validate(comp, dimension);
        }
      },
      set);
}

int intrinsic_dim(const MinimaSet& set, int ambient_dim) {
  return std::visit(
      [&](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointSet>) return 0;
        if constexpr (std::is_same_v<T, SphereSet>) return ambient_dim - 1;
        if constexpr (std::is_same_v<T, SegmentSet>) return 1;
        if constexpr (std::is_same_v<T, UnionSet>) {
          int dim = 0;
          for (const auto& comp : s.components) dim = std::max(dim, intrinsic_dim(comp, ambient_dim));
          return dim;
        }
      },
      set);
}

double reach_hint(const MinimaSet& set) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointSet>) return std::numeric_limits<double>::infinity();
        if constexpr (std::is_same_v<T, SphereSet>) return s.radius;
        if constexpr (std::is_same_v<T, SegmentSet>) return std::numeric_limits<double>::infinity();
        if constexpr (std::is_same_v<T, UnionSet>) {
          const int dim = ambient_dim(set);
          double hint = std::numeric_limits<double>::infinity();
          for (const auto& comp : s.components) hint = std::min(hint, reach_hint(comp));
          for (std::size_t i = 0; i < s.components.size(); ++i)
            for (std::size_t j = i + 1; j < s.components.size(); ++j)
              hint = std::min(hint, 0.5 * set_gap(s.components[i], s.components[j], dim));
          return hint;
        }
      },
      set);
}

Vector sample_point_on(const MinimaSet& set, int dim, RngStream& rng) {
  return std::visit(
      [&](const auto& s) -> Vector {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointSet>) return s.center;
        if constexpr (std::is_same_v<T, SphereSet>) return s.center + s.radius * rng.unit_vector(dim);
        if constexpr (std::is_same_v<T, SegmentSet>) return s.a + rng.uniform01() * (s.b - s.a);
        if constexpr (std::is_same_v<T, UnionSet>) {
          const std::size_t k = rng.uniform_index(s.components.size());
          return sample_point_on(s.components[k], dim, rng);
        }
      },
      set);
}

}  // namespace sgdlab
