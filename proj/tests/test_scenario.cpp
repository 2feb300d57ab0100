#include <doctest.h>

#include <cmath>

#include "noma/scenario.hpp"

using namespace noma;

TEST_CASE("grid construction from start and spacing") {
  const PowerLevelGrid g = build_snr_grid(15.0, 1.5, 13);
  CHECK(g.q_count == 13);
  CHECK(g.snr_db[0] == doctest::Approx(15.0).epsilon(1e-15));
  CHECK(g.snr_db[12] == doctest::Approx(33.0).epsilon(1e-15));
  for (Index q = 0; q < 13; ++q)
    CHECK(g.snr_linear[q] == doctest::Approx(std::pow(10.0, g.snr_db[q] / 10.0)).epsilon(1e-14));
  CHECK(g.target_mean_snr == doctest::Approx(g.snr_linear.mean()).epsilon(1e-15));
}

TEST_CASE("grid construction from endpoints matches spacing form") {
  const PowerLevelGrid a = build_snr_grid_endpoints(15.0, 33.0, 13);
  const PowerLevelGrid b = build_snr_grid(15.0, 1.5, 13);
  REQUIRE(a.q_count == b.q_count);
  for (Index q = 0; q < a.q_count; ++q) {
    CHECK(a.snr_db[q] == doctest::Approx(b.snr_db[q]).epsilon(1e-15));
    CHECK(a.snr_linear[q] == doctest::Approx(b.snr_linear[q]).epsilon(1e-15));
  }
}

TEST_CASE("grid validation rejects bad inputs") {
  CHECK_THROWS_AS(build_snr_grid(15.0, -1.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(build_snr_grid(15.0, 1.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_snr_grid_endpoints(20.0, 15.0, 5), std::invalid_argument);

  PowerLevelGrid g = build_snr_grid(15.0, 1.5, 4);
  CHECK_THROWS_AS(g.with_target_mean(g.snr_linear[0] * 0.5), std::invalid_argument);
  CHECK_THROWS_AS(g.with_target_mean(g.snr_linear[3] * 2.0), std::invalid_argument);
  const PowerLevelGrid shifted = g.with_target_mean(g.snr_linear[1]);
  CHECK(shifted.target_mean_snr == g.snr_linear[1]);
}

TEST_CASE("poisson weights") {
  const TrafficModel t = poisson_weights(0.5, 2);
  t.validate();
  const double e = std::exp(-0.5);
  CHECK(t.weights[0] == doctest::Approx(e).epsilon(1e-15));
  CHECK(t.weights[1] == doctest::Approx(0.5 * e).epsilon(1e-15));
  CHECK(t.weights[2] == doctest::Approx(0.125 * e).epsilon(1e-15));
  CHECK(t.weights.sum() < 1.0);

  const TrafficModel zero = poisson_weights(0.0, 3);
  CHECK(zero.weights[0] == 1.0);
  CHECK(zero.weights[1] == 0.0);
  CHECK(zero.weights[3] == 0.0);
}

TEST_CASE("level distribution invariants") {
  LevelDistribution d = uniform_distribution(7);
  d.validate();
  CHECK(d.probs.sum() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d.size() == 7);

  const PowerLevelGrid g = build_snr_grid(15.0, 1.5, 7);
  CHECK(d.mean_snr(g) == doctest::Approx(g.snr_linear.mean()).epsilon(1e-12));

  LevelDistribution bad;
  bad.probs = Vector::Constant(3, 0.5);
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.probs.resize(2);
  bad.probs << 1.5, -0.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("modulation names round-trip") {
  CHECK(modulation_from_string("BPSK") == Modulation::BPSK);
  CHECK(modulation_from_string("qpsk") == Modulation::QPSK);
  CHECK(modulation_from_string(to_string(Modulation::QPSK)) == Modulation::QPSK);
  CHECK_THROWS_AS(modulation_from_string("8PSK"), std::invalid_argument);
}

TEST_CASE("dB conversions invert each other") {
  for (const double db : {0.0, 3.0, 15.0, 33.0}) {
    CHECK(linear_to_db(db_to_linear(db)) == doctest::Approx(db).epsilon(1e-13));
  }
}
