#include <doctest.h>

#include <cmath>
#include <limits>

#include "sgdlab/minima_set.hpp"

using namespace sgdlab;

namespace {

Vector vec2(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}

MinimaSet unit_circle() { return SphereSet{Vector::Zero(2), 1.0}; }

}  // namespace

TEST_CASE("projection onto the unit circle") {
  const MinimaSet circle = unit_circle();

  SUBCASE("radial geometry is forced") {
    const ProjectionResult pr = dist_and_project(vec2(2.0, 0.0), circle);
    CHECK(pr.distance == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(pr.projection.isApprox(vec2(1.0, 0.0), 1e-14));
    CHECK(pr.unique);
  }

  SUBCASE("center is equidistant: canonical representative along e_1") {
    const ProjectionResult pr = dist_and_project(vec2(0.0, 0.0), circle);
    CHECK(pr.distance == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_FALSE(pr.unique);
    CHECK(pr.projection.isApprox(vec2(1.0, 0.0), 1e-14));
  }

  SUBCASE("midpoint between a point and its projection keeps the projection") {
    const ProjectionResult pr = dist_and_project(vec2(1.5, 0.0), circle);
    CHECK(pr.unique);
    CHECK(pr.projection.isApprox(vec2(1.0, 0.0), 1e-12));
  }

  SUBCASE("projection lies on the set") {
    RngStream rng(3);
    for (int k = 0; k < 200; ++k) {
      const Vector x = 3.0 * rng.gaussian(2);
      const ProjectionResult pr = dist_and_project(x, circle);
      CHECK(std::abs(pr.projection.norm() - 1.0) < 1e-12);
      CHECK(std::abs((x - pr.projection).norm() - pr.distance) < 1e-12);
    }
  }
}

TEST_CASE("projection onto points and segments") {
  const MinimaSet point = PointSet{vec2(1.0, -2.0)};
  const ProjectionResult pr = dist_and_project(vec2(4.0, 2.0), point);
  CHECK(pr.distance == doctest::Approx(5.0));
  CHECK(pr.unique);

  const MinimaSet seg = SegmentSet{vec2(0.0, 0.0), vec2(2.0, 0.0)};
  CHECK(dist_and_project(vec2(1.0, 3.0), seg).projection.isApprox(vec2(1.0, 0.0), 1e-14));
  CHECK(dist_and_project(vec2(-1.0, 0.0), seg).projection.isApprox(vec2(0.0, 0.0), 1e-14));
  CHECK(dist_and_project(vec2(5.0, 1.0), seg).distance == doctest::Approx(std::sqrt(10.0)));
  CHECK(dist_and_project(vec2(1.0, 3.0), seg).unique);
}

TEST_CASE("union ties are flagged with the lexicographically smallest candidate") {
  // Two parallel segments; the midline between them is equidistant.
  UnionSet u;
  u.components.push_back(SegmentSet{vec2(-1.0, -0.25), vec2(1.0, -0.25)});
  u.components.push_back(SegmentSet{vec2(-1.0, 0.25), vec2(1.0, 0.25)});
  const MinimaSet set = u;

  const ProjectionResult tie = dist_and_project(vec2(0.3, 0.0), set);
  CHECK_FALSE(tie.unique);
  CHECK(tie.projection.isApprox(vec2(0.3, -0.25), 1e-14));
  CHECK(tie.distance == doctest::Approx(0.25));

  const ProjectionResult off = dist_and_project(vec2(0.3, 0.1), set);
  CHECK(off.unique);
  CHECK(off.projection.isApprox(vec2(0.3, 0.25), 1e-14));
}

TEST_CASE("projection betweenness") {
  // For y strictly between x and its projection, the projection of y is
  // unique and equals the projection of x.
  std::vector<MinimaSet> sets;
  sets.push_back(unit_circle());
  sets.push_back(PointSet{vec2(0.5, 0.5)});
  sets.push_back(SegmentSet{vec2(-1.0, 0.0), vec2(1.0, 0.5)});
  {
    UnionSet u;
    u.components.push_back(PointSet{vec2(-1.0, 0.0)});
    u.components.push_back(PointSet{vec2(1.0, 0.0)});
    sets.push_back(u);
  }

  RngStream rng(7);
  for (const auto& set : sets) {
    for (int k = 0; k < 1000; ++k) {
      const Vector x = 2.5 * rng.gaussian(2);
      const ProjectionResult px = dist_and_project(x, set);
      if (px.distance < 1e-9) continue;
      const double t = rng.uniform01();
      if (t < 1e-6 || t > 1.0 - 1e-6) continue;
      const Vector y = (1.0 - t) * px.projection + t * x;
      const ProjectionResult py = dist_and_project(y, set);
      REQUIRE(py.unique);
      REQUIRE((py.projection - px.projection).norm() < 1e-9);
    }
  }
}

TEST_CASE("minima set validation and metadata") {
  CHECK_THROWS_AS(validate(MinimaSet(SphereSet{Vector::Zero(2), 0.0}), 2), std::invalid_argument);
  CHECK_THROWS_AS(validate(MinimaSet(SphereSet{Vector::Zero(2), -1.0}), 2), std::invalid_argument);
  CHECK_THROWS_AS(validate(MinimaSet(PointSet{Vector::Zero(3)}), 2), std::invalid_argument);
  CHECK_THROWS_AS(validate(MinimaSet(UnionSet{}), 2), std::invalid_argument);
  CHECK_NOTHROW(validate(unit_circle(), 2));

  Vector bad = vec2(1.0, std::numeric_limits<double>::quiet_NaN());
  CHECK_THROWS_AS(dist_and_project(bad, unit_circle()), std::domain_error);

  CHECK(intrinsic_dim(unit_circle(), 2) == 1);
  CHECK(intrinsic_dim(MinimaSet(PointSet{Vector::Zero(2)}), 2) == 0);
  CHECK(intrinsic_dim(MinimaSet(SegmentSet{vec2(0, 0), vec2(1, 0)}), 2) == 1);
  CHECK(ambient_dim(unit_circle()) == 2);

  CHECK(reach_hint(unit_circle()) == doctest::Approx(1.0));
  UnionSet two_points;
  two_points.components.push_back(PointSet{vec2(-1.0, 0.0)});
  two_points.components.push_back(PointSet{vec2(1.0, 0.0)});
  CHECK(reach_hint(MinimaSet(two_points)) == doctest::Approx(1.0));
}

TEST_CASE("sampling on the set is deterministic and on-set") {
  const MinimaSet circle = unit_circle();
  RngStream a(42), b(42);
  for (int k = 0; k < 50; ++k) {
    const Vector pa = sample_point_on(circle, 2, a);
    const Vector pb = sample_point_on(circle, 2, b);
    CHECK(pa == pb);
    CHECK(std::abs(pa.norm() - 1.0) < 1e-12);
  }
}
