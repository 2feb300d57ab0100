#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <stdexcept>

#include "noma/stats.hpp"

using namespace noma;

TEST_CASE("normal quantiles") {
  CHECK(z_for_confidence(0.95) == doctest::Approx(1.95996398454).epsilon(1e-9));
  CHECK(z_for_confidence(0.99) == doctest::Approx(2.57582930355).epsilon(1e-9));
  CHECK(z_for_confidence(0.6827) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("regularized incomplete beta reference values") {
  // Integer parameters reduce to binomial tail sums.
  CHECK(incomplete_beta(2.0, 3.0, 0.5) == doctest::Approx(11.0 / 16.0).epsilon(1e-12));
  CHECK(incomplete_beta(1.0, 1.0, 0.3) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(incomplete_beta(3.0, 1.0, 0.7) == doctest::Approx(0.343).epsilon(1e-12));
  CHECK(incomplete_beta(2.0, 2.0, 0.25) == doctest::Approx(5.0 / 32.0).epsilon(1e-12));
  CHECK(incomplete_beta(4.0, 2.0, 1.0) == 1.0);
  CHECK(incomplete_beta(4.0, 2.0, 0.0) == 0.0);
}

TEST_CASE("incomplete beta symmetry") {
  for (const double x : {0.1, 0.35, 0.5, 0.8}) {
    for (const double a : {0.5, 2.0, 7.5}) {
      for (const double b : {1.0, 3.25}) {
        CHECK(incomplete_beta(a, b, x) ==
              doctest::Approx(1.0 - incomplete_beta(b, a, 1.0 - x)).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("normal interval half width") {
  CHECK(normal_ci_half_width(50, 100, 0.95) == doctest::Approx(0.0979982).epsilon(1e-5));
  CHECK(normal_ci_half_width(0, 100, 0.95) == 0.0);
  CHECK_THROWS_AS(normal_ci_half_width(5, 0), std::invalid_argument);
  CHECK_THROWS_AS(normal_ci_half_width(7, 5), std::invalid_argument);
}

TEST_CASE("Clopper-Pearson reference intervals") {
  const Interval mid = clopper_pearson(5, 10, 0.95);
  CHECK(mid.lo == doctest::Approx(0.187086).epsilon(2e-5));
  CHECK(mid.hi == doctest::Approx(0.812914).epsilon(2e-5));

  const Interval none = clopper_pearson(0, 10, 0.95);
  CHECK(none.lo == 0.0);
  CHECK(none.hi == doctest::Approx(1.0 - std::pow(0.025, 0.1)).epsilon(1e-9));

  const Interval all = clopper_pearson(10, 10, 0.95);
  CHECK(all.hi == 1.0);
  CHECK(all.lo == doctest::Approx(std::pow(0.025, 0.1)).epsilon(1e-9));
}

TEST_CASE("Clopper-Pearson contains the point estimate") {
  for (long long x : {1LL, 3LL, 9LL, 50LL, 99LL}) {
    const Interval ci = clopper_pearson(x, 100, 0.95);
    const double p = static_cast<double>(x) / 100.0;
    CHECK(ci.lo <= p);
    CHECK(ci.hi >= p);
    CHECK(ci.lo < ci.hi);
  }
}
