#include "sgdlab/landscape.hpp"

#include <cmath>
#include <stdexcept>

namespace sgdlab {

namespace {

double power(double base, double exponent) {
  if (exponent == 2.0) return base * base;
  if (exponent == 3.0) return base * base * base;
  if (exponent == 4.0) {
    const double b2 = base * base;
    return b2 * b2;
  }
  return std::pow(base, exponent);
}

Evaluation evaluate_power_basin(const Landscape& l, const PowerBasin& fam, const Vector& x,
                                const ProjectionResult& pr) {
  Evaluation ev;
  ev.inside_validity = pr.distance <= l.validity_radius;
  ev.value = fam.scale * power(pr.distance, fam.degree) + l.f_star;
  if (pr.distance <= 0.0) {
    ev.gradient = Vector::Zero(l.dimension);
  } else {
    // grad = scale * degree * dist^(degree-1) * v with v the unit direction
    // from the projection to x; written against (x - x_p) to avoid one
    // normalization: scale * degree * dist^(degree-2) * (x - x_p).
    const double coef = fam.scale * fam.degree * power(pr.distance, fam.degree - 2.0);
    ev.gradient = coef * (x - pr.projection);
  }
  return ev;
}

}  // namespace

Evaluation evaluate_at(const Landscape& landscape, const Vector& x, const ProjectionResult& pr) {
  if (const auto* fam = std::get_if<PowerBasin>(&landscape.family))
    return evaluate_power_basin(landscape, *fam, x, pr);
  const auto& fam = std::get<CustomFamily>(landscape.family);
  Evaluation ev;
  ev.value = fam.value(x);
  ev.gradient = fam.gradient(x);
  ev.inside_validity = pr.distance <= landscape.validity_radius;
  return ev;
}

Evaluation evaluate(const Landscape& landscape, const Vector& x) {
  return evaluate_at(landscape, x, dist_and_project(x, landscape.minima));
}

std::pair<double, Vector> oracle_eval(const Landscape& landscape, const Vector& x) {
  if (!x.allFinite()) throw std::domain_error("oracle_eval: non-finite input point");
  Evaluation ev = evaluate(landscape, x);
  if (!ev.inside_validity)
    throw RegionError("oracle_eval: point outside the declared validity region");
  return {ev.value, std::move(ev.gradient)};
}

double default_gradient_step(const Vector& x) { return 1e-6 * (1.0 + x.norm()); }

double default_hessian_step(const Vector& x) { return 1e-4 * (1.0 + x.norm()); }

Vector gradient_fd(const Landscape& landscape, const Vector& x, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("gradient_fd: step must be positive");
  Vector g(x.size());
  Vector probe = x;
  for (int i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double fp = evaluate(landscape, probe).value;
    probe[i] = x[i] - step;
    const double fm = evaluate(landscape, probe).value;
    probe[i] = x[i];
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

Matrix hessian_fd(const Landscape& landscape, const Vector& x, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("hessian_fd: step must be positive");
  const int d = static_cast<int>(x.size());
  Matrix h(d, d);
  const double f0 = evaluate(landscape, x).value;
  Vector probe = x;
  for (int i = 0; i < d; ++i) {
    probe[i] = x[i] + step;
    const double fp = evaluate(landscape, probe).value;
    probe[i] = x[i] - step;
    const double fm = evaluate(landscape, probe).value;
    probe[i] = x[i];
    h(i, i) = (fp - 2.0 * f0 + fm) / (step * step);
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      probe[i] = x[i] + step;
      probe[j] = x[j] + step;
      const double fpp = evaluate(landscape, probe).value;
      probe[j] = x[j] - step;
      const double fpm = evaluate(landscape, probe).value;
      probe[i] = x[i] - step;
      probe[j] = x[j] + step;
      const double fmp = evaluate(landscape, probe).value;
      probe[j] = x[j] - step;
      const double fmm = evaluate(landscape, probe).value;
      probe[i] = x[i];
      probe[j] = x[j];
      h(i, j) = (fpp - fpm - fmp + fmm) / (4.0 * step * step);
      h(j, i) = h(i, j);
    }
  }
  return 0.5 * (h + h.transpose());
}

bool has_support(const Landscape& landscape) {
  return !std::holds_alternative<SupportNone>(landscape.support);
}

double support_value(const Landscape& landscape, const Vector& x, const Evaluation& ev,
                     const ProjectionResult& pr) {
  if (const auto* scaled = std::get_if<SupportGapScaled>(&landscape.support))
    return scaled->zeta * (ev.value - landscape.f_star);
  if (const auto* custom = std::get_if<SupportCustom>(&landscape.support)) return custom->h(x);
  return ev.gradient.dot(x - pr.projection);
}

namespace {

// Gradient self-check at deterministic points a safe distance from X: close
// enough to exercise the landscape, far enough that finite differences of a
// flat basin stay above round-off.
void gradient_self_check(const Landscape& landscape) {
  double span = 0.45 * reach_hint(landscape.minima);
  if (!std::isfinite(span)) span = 1.0;
  span = std::min(span, landscape.validity_radius);
  span = std::max(span, 1e-3);

  RngStream rng(0x5e1fc8ecull);
  for (int k = 0; k < 100; ++k) {
    const Vector z = sample_point_on(landscape.minima, landscape.dimension, rng);
    const double t = span * (0.05 + 0.95 * rng.uniform01());
    const Vector x = z + t * rng.unit_vector(landscape.dimension);
    const Vector g = evaluate(landscape, x).gradient;
    const Vector g_fd = gradient_fd(landscape, x, default_gradient_step(x));
    const double scale = std::max({g.norm(), g_fd.norm(), 1e-10});
    if ((g - g_fd).norm() / scale > 1e-5)
      throw std::runtime_error("make_landscape: declared gradient disagrees with finite differences");
  }
}

}  // namespace

Landscape make_landscape(const LandscapeSpec& spec) {
  if (spec.dimension < 1) throw std::invalid_argument("make_landscape: dimension must be positive");
  validate(spec.minima, spec.dimension);

  Landscape l;
  l.dimension = spec.dimension;
  l.minima = spec.minima;
  l.f_star = spec.f_star;
  l.validity_radius = spec.validity_radius;
  l.support = spec.support;

  if (spec.family == LandscapeSpec::Family::kPowerBasin) {
    if (!(spec.degree >= 2.0))
      throw std::invalid_argument("make_landscape: power basin degree must be >= 2");
    if (!(spec.scale > 0.0)) throw std::invalid_argument("make_landscape: scale must be positive");
    l.family = PowerBasin{spec.degree, spec.scale};
    if (std::holds_alternative<SupportNone>(spec.support)) {
      // (grad f, x - x_p) = degree * (f - f_star), and the radial slice
      // t -> scale * t^degree is unimodal, so the quasar constant is
      // min(degree, 1) = 1.
      l.support = SupportGapScaled{1.0};
    }
  } else {
    if (!spec.custom_value || !spec.custom_gradient)
      throw std::invalid_argument("make_landscape: custom family needs value and gradient");
    l.family = CustomFamily{spec.custom_value, spec.custom_gradient};
  }

  gradient_self_check(l);
  return l;
}

}  // namespace sgdlab
