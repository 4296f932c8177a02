#pragma once

#include <variant>
#include <vector>

#include "sgdlab/rng.hpp"
#include "sgdlab/types.hpp"

namespace sgdlab {

// A compact set of global minima with exact distance and metric projection.
// Variants: a single point, a full (d-1)-sphere embedded in R^d, a segment,
// or a finite union of such sets.

struct PointSet {
  Vector center;
};

struct SphereSet {
  Vector center;
  double radius = 1.0;
};

struct SegmentSet {
  Vector a;
  Vector b;
};

struct UnionSet;

using MinimaSet = std::variant<PointSet, SphereSet, SegmentSet, UnionSet>;

struct UnionSet {
  std::vector<MinimaSet> components;
};

struct ProjectionResult {
  double distance = 0.0;
  Vector projection;
  // False exactly when the set of nearest points has more than one element
  // (sphere center, equidistant points of a union). The projection returned
  // in that case is the canonical representative: center + radius * e_1 for
  // a sphere center, otherwise the lexicographically smallest candidate.
  bool unique = true;
};

/// Closed neighborhood N_r(X) = { x : dist(x, X) <= r }.
struct NeighborhoodSpec {
  double radius = 0.0;
  MinimaSet minima;
};

/// Nearest point of `set` to `x` with the exact distance.
/// Throws std::domain_error for non-finite input.
ProjectionResult dist_and_project(const Vector& x, const MinimaSet& set);

/// Checks shapes and parameter gates (radius > 0, matching dimensions,
/// non-empty unions). Throws std::invalid_argument on violation.
void validate(const MinimaSet& set, int dimension);

/// Intrinsic dimension of the set: 0 for points, d-1 for spheres, 1 for
/// segments, maximum over components for unions.
int intrinsic_dim(const MinimaSet& set, int ambient_dim);

/// Dimension of the space the set lives in.
int ambient_dim(const MinimaSet& set);

/// Conservative radius within which projections are unique along normals.
/// Infinite for convex variants; the sphere radius for spheres; half the
/// smallest gap between components for unions. A sampling hint, not a
/// contract.
double reach_hint(const MinimaSet& set);

/// Draws a point on the set: the point itself, uniform on the sphere,
/// uniform on the segment, or a uniformly chosen component for unions.
Vector sample_point_on(const MinimaSet& set, int dim, RngStream& rng);

}  // namespace sgdlab
