#pragma once

#include <functional>
#include <limits>
#include <utility>
#include <variant>

#include "sgdlab/minima_set.hpp"
#include "sgdlab/types.hpp"

namespace sgdlab {

// Loss families whose global minima set X is represented exactly.

/// f(x) = scale * dist(x, X)^degree. Flat basin for degree > 2, quadratic
/// baseline for degree == 2.
struct PowerBasin {
  double degree = 2.0;
  double scale = 1.0;
};

/// User-supplied evaluator with a declared gradient.
struct CustomFamily {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
};

using LandscapeFamily = std::variant<PowerBasin, CustomFamily>;

// Registered support function h for the non-negative support inequality
// (grad f(x), x - x_p) >= h(x) >= 0. Families that know an analytic h
// declare it here; otherwise the raw inner product stands in as a proxy.
struct SupportNone {};
struct SupportGapScaled {
  double zeta = 1.0;  // h = zeta * (f - f_star)
};
struct SupportCustom {
  std::function<double(const Vector&)> h;
};
using SupportFunction = std::variant<SupportNone, SupportGapScaled, SupportCustom>;

struct Landscape {
  int dimension = 0;
  MinimaSet minima;
  LandscapeFamily family;
  double f_star = 0.0;
  // Evaluation outside this radius around X is still defined by the same
  // formula but flagged, so diverged trajectories stay inspectable.
  double validity_radius = std::numeric_limits<double>::infinity();
  SupportFunction support = SupportNone{};
};

struct Evaluation {
  double value = 0.0;
  Vector gradient;
  bool inside_validity = true;
};

/// Value and gradient, extended by formula outside the validity region
/// (the flag records the excursion).
Evaluation evaluate(const Landscape& landscape, const Vector& x);

/// Same as evaluate() but reuses an already computed projection of x.
Evaluation evaluate_at(const Landscape& landscape, const Vector& x, const ProjectionResult& pr);

/// Strict evaluation: throws RegionError when x lies outside the declared
/// validity region, std::domain_error for non-finite x.
std::pair<double, Vector> oracle_eval(const Landscape& landscape, const Vector& x);

double default_gradient_step(const Vector& x);  // 1e-6 * (1 + |x|)
double default_hessian_step(const Vector& x);   // 1e-4 * (1 + |x|)

/// Central-difference gradient of the landscape value.
Vector gradient_fd(const Landscape& landscape, const Vector& x, double step);

/// Symmetric matrix of second-order central differences, (H + H^T)/2.
/// Throws std::invalid_argument for step <= 0.
Matrix hessian_fd(const Landscape& landscape, const Vector& x, double step);

bool has_support(const Landscape& landscape);

/// Registered h(x), or the raw inner product (grad, x - x_p) when no
/// support function is declared.
double support_value(const Landscape& landscape, const Vector& x, const Evaluation& ev,
                     const ProjectionResult& pr);

struct LandscapeSpec {
  enum class Family { kPowerBasin, kCustom };
  Family family = Family::kPowerBasin;
  double degree = 2.0;
  double scale = 1.0;
  int dimension = 0;
  MinimaSet minima;
  double f_star = 0.0;
  double validity_radius = std::numeric_limits<double>::infinity();
  // Only for Family::kCustom.
  std::function<double(const Vector&)> custom_value;
  std::function<Vector(const Vector&)> custom_gradient;
  SupportFunction support = SupportNone{};
};

/// Builds a landscape from a spec, gates the parameters (degree >= 2,
/// positive radii) and runs a gradient-vs-finite-difference self-check at
/// 100 deterministic sample points.
Landscape make_landscape(const LandscapeSpec& spec);

}  // namespace sgdlab
