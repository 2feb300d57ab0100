#include "noma/stats.hpp"

#include <cmath>

#include "noma/types.hpp"

namespace noma {

namespace {

// Continued fraction for the regularized incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-15;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const double dm = static_cast<double>(m);
    double num = dm * (b - dm) * x / ((a + 2.0 * dm - 1.0) * (a + 2.0 * dm));
    d = 1.0 + num * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    num = -(a + dm) * (a + b + dm) * x / ((a + 2.0 * dm) * (a + 2.0 * dm + 1.0));
    d = 1.0 + num * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < eps) break;
  }
  return h;
}

// Inverse of p -> I_p(a, b) by bisection; the map is strictly increasing.
double incomplete_beta_inv(double a, double b, double target) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (incomplete_beta(a, b, mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double z_for_confidence(double confidence) {
  require(confidence > 0.0 && confidence < 1.0, "confidence must lie in (0, 1)");
  const double tail = 1.0 - confidence;
  double lo = 0.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (std::erfc(mid / std::sqrt(2.0)) > tail)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double incomplete_beta(double a, double b, double x) {
  require(a > 0.0 && b > 0.0, "beta parameters must be positive");
  require(x >= 0.0 && x <= 1.0, "x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_front = a * std::log(x) + b * std::log1p(-x) -
                          (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
  if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(ln_front) * beta_cf(a, b, x) / a;
  return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) + std::lgamma(a + b) -
                        std::lgamma(a) - std::lgamma(b)) *
                   beta_cf(b, a, 1.0 - x) / b;
}

double normal_ci_half_width(long long successes, long long trials, double confidence) {
  require(trials > 0, "trials must be positive");
  require(successes >= 0 && successes <= trials, "successes must lie in [0, trials]");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  return z_for_confidence(confidence) * std::sqrt(p * (1.0 - p) / n);
}

Interval clopper_pearson(long long successes, long long trials, double confidence) {
  require(trials > 0, "trials must be positive");
  require(successes >= 0 && successes <= trials, "successes must lie in [0, trials]");
  const double alpha = 1.0 - confidence;
  require(alpha > 0.0 && alpha < 1.0, "confidence must lie in (0, 1)");
  const double x = static_cast<double>(successes);
  const double n = static_cast<double>(trials);
  Interval ci;
  ci.lo = successes == 0 ? 0.0 : incomplete_beta_inv(x, n - x + 1.0, alpha / 2.0);
  ci.hi = successes == trials ? 1.0 : incomplete_beta_inv(x + 1.0, n - x, 1.0 - alpha / 2.0);
  return ci;
}

}  // namespace noma
