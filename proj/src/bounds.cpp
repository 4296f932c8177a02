#include "sgdlab/bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sgdlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double value) {
    const double y = value - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

// Tail sum_{j > m} j^{-s} by Euler-Maclaurin; the neglected term is
// O(s^5 m^{-s-5}), far below double precision for the m used here.
double tail_power_sum(double m, double s) {
  const double x = m + 1.0;
  const double x_pow = std::pow(x, -s);
  double tail = x * x_pow / (s - 1.0);  // integral from x of t^{-s}
  tail += 0.5 * x_pow;
  tail += s / 12.0 * x_pow / x;
  tail -= s * (s + 1.0) * (s + 2.0) / 720.0 * x_pow / (x * x * x);
  return tail;
}

// log b_inf = sum_{j>=1} log1p(L^2 a^2 / j^{2 beta}): a partial sum plus the
// log1p power series applied to analytic tails of j^{-2 k beta}.
double log_b_infinity(double lipschitz, double a, double beta) {
  const double c = lipschitz * lipschitz * a * a;
  if (c == 0.0) return 0.0;
  const long m = 100000;
  KahanSum sum;
  for (long j = 1; j <= m; ++j)
    sum.add(std::log1p(c / std::pow(static_cast<double>(j), 2.0 * beta)));
  double term_scale = 1.0;
  for (int k = 1; k <= 40; ++k) {
    term_scale *= c;
    const double term = (k % 2 == 1 ? 1.0 : -1.0) * term_scale / k *
                        tail_power_sum(static_cast<double>(m), 2.0 * k * beta);
    sum.add(term);
    if (std::abs(term) < 1e-18 * (1.0 + std::abs(sum.sum))) break;
  }
  return sum.sum;
}

double decreasing_lhs(double a, double beta, double lipschitz, double dist1, double sigma_r,
                      int batch) {
  const double weight = 2.0 * beta / (2.0 * beta - 1.0);
  const double l2 = lipschitz * lipschitz;
  return std::exp(weight * l2 * a * a) *
         (dist1 * dist1 + weight * sigma_r * a * a / static_cast<double>(batch));
}

}  // namespace

void validate(const BoundInputs& inputs) {
  if (!(inputs.radius > 0.0)) throw std::invalid_argument("bounds: radius must be positive");
  if (!(inputs.dist1 >= 0.0)) throw std::invalid_argument("bounds: dist1 must be non-negative");
  if (inputs.dist1 > inputs.radius)
    throw std::invalid_argument("bounds: premise dist(x_1, X) <= r fails");
  if (!(inputs.lipschitz > 0.0)) throw std::invalid_argument("bounds: Lipschitz constant must be positive");
  if (!(inputs.sigma_r >= 0.0)) throw std::invalid_argument("bounds: sigma_r must be non-negative");
  if (inputs.batch_size < 1) throw std::invalid_argument("bounds: batch size must be >= 1");
  if (inputs.horizon) {
    if (*inputs.horizon < 1) throw std::invalid_argument("bounds: horizon must be >= 1");
  } else if (inputs.schedule.kind != Schedule::Kind::kDecreasing) {
    throw std::invalid_argument("bounds: infinite horizon needs a decreasing schedule");
  }
}

double compute_bn(double lipschitz, const Schedule& schedule, long n) {
  if (n < 1) throw std::invalid_argument("compute_bn: n must be >= 1");
  const double l2 = lipschitz * lipschitz;
  KahanSum log_b;
  for (long j = 1; j < n; ++j) {
    const double aj = schedule.rate(j);
    log_b.add(std::log1p(l2 * aj * aj));
  }
  return std::exp(log_b.sum);
}

BoundReport compute_cn(const BoundInputs& inputs) {
  validate(inputs);
  const double l2 = inputs.lipschitz * inputs.lipschitz;
  const double r2 = inputs.radius * inputs.radius;
  const double noise = inputs.sigma_r / static_cast<double>(inputs.batch_size);

  BoundReport report;
  if (inputs.horizon) {
    const long n_states = *inputs.horizon;
    report.log_b.resize(n_states);
    report.log_b[0] = 0.0;  // b_1 = 1
    KahanSum log_b;
    KahanSum series;  // sum_{n=1}^{N-1} a_n^2 / b_{n+1}
    for (long n = 1; n < n_states; ++n) {
      const double an = inputs.schedule.rate(n);
      log_b.add(std::log1p(l2 * an * an));
      report.log_b[n] = log_b.sum;
      series.add(an * an * std::exp(-log_b.sum));
    }
    report.b_final = std::exp(log_b.sum);
    report.cn = report.b_final / r2 * (inputs.dist1 * inputs.dist1 + noise * series.sum);
  } else {
    const double log_b = log_b_infinity(inputs.lipschitz, inputs.schedule.a, inputs.schedule.beta);
    report.b_final = std::exp(log_b);
    // sum a_n^2 / b_{n+1} telescopes: each term is (1/b_n - 1/b_{n+1}) / L^2.
    const double series = -std::expm1(-log_b) / l2;
    report.cn = report.b_final / r2 * (inputs.dist1 * inputs.dist1 + noise * series);
  }
  report.stability_lower_bound = 1.0 - report.cn;
  report.vacuous = report.cn >= 1.0;
  return report;
}

DecreasingLrBound check_decreasing_lr_bound(const BoundInputs& inputs) {
  validate(inputs);
  if (inputs.schedule.kind != Schedule::Kind::kDecreasing)
    throw std::invalid_argument("check_decreasing_lr_bound: needs a decreasing schedule");
  const double beta = inputs.schedule.beta;
  if (!(beta > 0.5)) throw std::invalid_argument("check_decreasing_lr_bound: beta must exceed 1/2");

  auto lhs_at = [&](double a) {
    return decreasing_lhs(a, beta, inputs.lipschitz, inputs.dist1, inputs.sigma_r,
                          inputs.batch_size);
  };
  const double r2 = inputs.radius * inputs.radius;

  DecreasingLrBound out;
  out.lhs = lhs_at(inputs.schedule.a);
  out.margin = r2 - out.lhs;
  out.holds = out.lhs < r2;

  if (inputs.dist1 * inputs.dist1 >= r2) {
    // exp(.) >= 1 forces lhs >= dist1^2 for every a > 0.
    out.max_a = 0.0;
    return out;
  }
  if (inputs.dist1 == 0.0 && inputs.sigma_r == 0.0) {
    out.max_a = kInf;  // lhs is identically zero
    return out;
  }
  double hi = 1.0;
  while (lhs_at(hi) < r2 && hi < 1e12) hi *= 2.0;
  double lo = 0.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-10; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (lhs_at(mid) < r2 ? lo : hi) = mid;
  }
  out.max_a = lo;
  return out;
}

ConstantLrBound check_constant_lr_bound(const BoundInputs& inputs) {
  validate(inputs);
  if (inputs.schedule.kind != Schedule::Kind::kConstant)
    throw std::invalid_argument("check_constant_lr_bound: needs a constant schedule");
  if (!inputs.horizon) throw std::invalid_argument("check_constant_lr_bound: needs a finite horizon");
  const long n_states = *inputs.horizon;
  const double a = inputs.schedule.a;
  const double l2 = inputs.lipschitz * inputs.lipschitz;
  // (1 + L^2 a^2)^{N-1} and its reciprocal through log1p/expm1 so the
  // geometric factor stays accurate for tiny a.
  const double log_factor = static_cast<double>(n_states - 1) * std::log1p(l2 * a * a);
  const double growth = std::exp(log_factor);
  const double geometric = -std::expm1(-log_factor);  // 1 - (1 + L^2 a^2)^{-(N-1)}
  const double lhs = growth * (inputs.dist1 * inputs.dist1 +
                               inputs.sigma_r / (static_cast<double>(inputs.batch_size) * l2) *
                                   geometric);
  ConstantLrBound out;
  out.lhs = lhs;
  out.margin = inputs.radius * inputs.radius - lhs;
  out.holds = lhs < inputs.radius * inputs.radius;
  return out;
}

double concentration_rhs(const BoundInputs& inputs, double epsilon, long n_states) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("concentration_rhs: epsilon must be positive");
  if (n_states < 1) throw std::invalid_argument("concentration_rhs: horizon must be >= 1");
  validate(inputs);

  const double l2 = inputs.lipschitz * inputs.lipschitz;
  KahanSum log_b;
  KahanSum numerator_series;  // sum_{n=1}^{N} a_n^2 / b_{n+1}
  KahanSum rate_series;       // sum_{n=1}^{N} a_n / b_{n+1}
  for (long n = 1; n <= n_states; ++n) {
    const double an = inputs.schedule.rate(n);
    log_b.add(std::log1p(l2 * an * an));
    const double inv_b = std::exp(-log_b.sum);
    numerator_series.add(an * an * inv_b);
    rate_series.add(an * inv_b);
  }
  BoundInputs next = inputs;
  next.horizon = n_states + 1;
  const double c_next = compute_cn(next).cn;

  const double numerator = inputs.dist1 * inputs.dist1 +
                           inputs.sigma_r / static_cast<double>(inputs.batch_size) *
                               numerator_series.sum;
  if (rate_series.sum == 0.0) return numerator == 0.0 ? c_next : kInf;
  return numerator / (epsilon * 2.0 * rate_series.sum) + c_next;
}

double predicted_rate(RateKind kind, double beta) {
  if (!(beta > 0.5) || !(beta < 1.0))
    throw std::invalid_argument("predicted_rate: beta must lie in (1/2, 1)");
  return kind == RateKind::kWqc ? 1.0 - beta : beta;
}

}  // namespace sgdlab
