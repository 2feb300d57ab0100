#pragma once

namespace noma {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Two-sided standard-normal quantile: P(|Z| <= z) = confidence.
double z_for_confidence(double confidence);

/// Half-width of the normal-approximation confidence interval for a
/// binomial proportion with `successes` out of `trials`.
double normal_ci_half_width(long long successes, long long trials, double confidence = 0.95);

/// Exact (Clopper-Pearson) confidence interval for a binomial proportion.
Interval clopper_pearson(long long successes, long long trials, double confidence = 0.95);

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

}  // namespace noma
