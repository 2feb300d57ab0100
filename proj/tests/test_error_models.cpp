#include <doctest.h>

#include <cmath>

#include "noma/error_models.hpp"
#include "noma/scenario.hpp"

using namespace noma;

namespace {

ErrorModelSpec mc_spec(long long trials, std::uint64_t seed = 7) {
  ErrorModelSpec spec;
  spec.mode = ErrorMode::MonteCarlo;
  spec.mc_trials = trials;
  spec.mc_seed = seed;
  return spec;
}

}  // namespace

TEST_CASE("single user BEP closed form") {
  CHECK(single_user_bep(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  const double g = db_to_linear(10.0);
  CHECK(single_user_bep(g) == doctest::Approx(0.5 * std::erfc(std::sqrt(g))).epsilon(1e-15));
  CHECK(single_user_bep(db_to_linear(15.0)) < single_user_bep(db_to_linear(10.0)));
  CHECK_THROWS_AS(single_user_bep(-1.0), std::invalid_argument);
}

TEST_CASE("two-user BEP degenerate interferer limits") {
  // A zero-power interferer leaves the single-user channel.
  const double g = db_to_linear(12.0);
  CHECK(two_user_bep(g, 0.0) == doctest::Approx(single_user_bep(g)).epsilon(1e-15));
  // A zero-power tagged user fails half the time.
  CHECK(two_user_bep(0.0, g) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("two-user BEP case boundary at high SNR") {
  for (const double db : {15.0, 20.0, 27.0, 33.0}) {
    const double g = db_to_linear(db);
    const double equal = two_user_bep(g, g);
    const double a = std::sqrt(g);
    CHECK(equal == doctest::Approx(0.25 * (std::erfc(2.0 * a) + 1.0)).epsilon(1e-15));
    // Stronger-tagged branch limit agrees exactly; weaker-tagged branch
    // limit differs by 0.25*(erfc(a) - 2 erfc(2a) + erfc(3a)), negligible
    // at the operating SNRs.
    const double eps = g * 1e-13;
    CHECK(std::abs(two_user_bep(g + eps, g) - equal) <= 1e-12);
    CHECK(std::abs(two_user_bep(g, g + eps) - equal) <= 1e-12);
  }
}

TEST_CASE("two-user BEP bounded, with the near-far spike at matched powers") {
  const double interferer = db_to_linear(18.0);
  for (double db = 0.0; db <= 35.0; db += 2.5) {
    const double v = two_user_bep(db_to_linear(db), interferer);
    CHECK(v >= 0.0);
    CHECK(v <= 0.5 + 1e-12);
  }

  // Once the tagged user is the stronger one, more power only helps.
  double prev = 1.0;
  for (double db = 19.0; db <= 35.0; db += 2.0) {
    const double v = two_user_bep(db_to_linear(db), interferer);
    CHECK(v <= prev + 1e-12);
    prev = v;
  }

  // Near power parity the superposed points collapse and errors spike
  // toward the 1/4 tie floor; well-separated powers on either side do far
  // better.
  const double near = two_user_bep(db_to_linear(17.5), interferer);
  CHECK(near > 0.1);
  CHECK(two_user_bep(db_to_linear(12.0), interferer) < 0.01);
  CHECK(two_user_bep(db_to_linear(24.0), interferer) < 0.01);
}

TEST_CASE("BEP to BLEP map") {
  CHECK(bep_to_blep(0.0, 100) == 0.0);
  CHECK(bep_to_blep(1.0, 3) == 1.0);
  CHECK(bep_to_blep(0.25, 1) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(bep_to_blep(1e-3, 100) == doctest::Approx(1.0 - std::pow(0.999, 100)).epsilon(1e-12));
  // Tiny BEPs keep full relative precision.
  CHECK(bep_to_blep(1e-15, 100) == doctest::Approx(1e-13).epsilon(1e-3));
  CHECK_THROWS_AS(bep_to_blep(-0.1, 10), std::invalid_argument);
  CHECK_THROWS_AS(bep_to_blep(0.5, 0), std::invalid_argument);
}

TEST_CASE("Monte Carlo joint detection matches analytic single user") {
  const double g = db_to_linear(6.0);
  const BepEstimate est = mc_joint_ml_bep({g}, mc_spec(200000));
  const double exact = single_user_bep(g);
  CHECK(est.std_error > 0.0);
  CHECK(std::abs(est.value - exact) <= 4.0 * est.std_error);
}

TEST_CASE("Monte Carlo joint detection matches analytic two-user cases") {
  const ErrorModelSpec spec = mc_spec(200000);
  for (const auto& pair : {std::pair<double, double>{20.0, 15.0},
                           std::pair<double, double>{15.0, 20.0},
                           std::pair<double, double>{8.0, 5.0},
                           std::pair<double, double>{5.0, 8.0}}) {
    const double g0 = db_to_linear(pair.first);
    const double g1 = db_to_linear(pair.second);
    const BepEstimate est = mc_joint_ml_bep({g0, g1}, spec);
    const double exact = two_user_bep(g0, g1);
    INFO("g0_db=", pair.first, " g1_db=", pair.second);
    CHECK(std::abs(est.value - exact) <= 4.0 * std::max(est.std_error, 1e-6));
  }
}

TEST_CASE("equal-level collision floors at high SNR") {
  const double g = db_to_linear(40.0);
  // Two equal users: the superposed points collide and the tie-break costs
  // the tagged user a quarter of the blocks.
  const BepEstimate two = mc_joint_ml_bep({g, g}, mc_spec(100000));
  CHECK(std::abs(two.value - 0.25) <= 0.006);
  // Three equal users: collapsed +/-a points decode to the lowest index,
  // costing 1/8 + 2/8 across the two collapsed clusters.
  const BepEstimate three = mc_joint_ml_bep({g, g, g}, mc_spec(100000));
  CHECK(std::abs(three.value - 0.375) <= 0.007);
}

TEST_CASE("Monte Carlo streams are reproducible and salted") {
  const double g = db_to_linear(10.0);
  const ErrorModelSpec spec = mc_spec(20000);
  const BepEstimate a = mc_joint_ml_bep({g, 0.5 * g}, spec, 3);
  const BepEstimate b = mc_joint_ml_bep({g, 0.5 * g}, spec, 3);
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
  const BepEstimate c = mc_joint_ml_bep({g, 0.5 * g}, spec, 4);
  CHECK(a.value != c.value);
}

TEST_CASE("collision BLEP analytic path and guards") {
  BlockConfig block;
  block.bits_per_block = 100;
  ErrorModelSpec spec;  // analytic
  const double g0 = db_to_linear(15.0);
  const double g1 = db_to_linear(16.5);

  const BepEstimate one = collision_blep_estimate({g0}, block, spec);
  CHECK(one.value == doctest::Approx(bep_to_blep(single_user_bep(g0), 100)).epsilon(1e-15));
  CHECK(one.std_error == 0.0);

  const BepEstimate two = collision_blep_estimate({g0, g1}, block, spec);
  CHECK(two.value == doctest::Approx(bep_to_blep(two_user_bep(g0, g1), 100)).epsilon(1e-15));

  CHECK_THROWS_AS(collision_blep_estimate({g0, g1, g1}, block, spec), UnsupportedModelError);
  BlockConfig qpsk = block;
  qpsk.modulation = Modulation::QPSK;
  ErrorModelSpec qspec;
  qspec.modulation = Modulation::QPSK;
  CHECK_THROWS_AS(collision_blep_estimate({g0}, qpsk, qspec), UnsupportedModelError);
}

TEST_CASE("independent-bit and direct-block models agree at moderate SNR") {
  BlockConfig block;
  block.bits_per_block = 50;
  const double g0 = db_to_linear(7.0);
  const double g1 = db_to_linear(9.0);

  ErrorModelSpec indep = mc_spec(150000);
  const BepEstimate a = collision_blep_estimate({g0, g1}, block, indep);

  ErrorModelSpec direct = mc_spec(150000);
  direct.block_model = BlockModel::DirectBlock;
  const BepEstimate b = collision_blep_estimate({g0, g1}, block, direct);

  const double exact = bep_to_blep(two_user_bep(g0, g1), 50);
  CHECK(std::abs(a.value - exact) <= 4.0 * std::max(a.std_error, 1e-6));
  CHECK(std::abs(b.value - exact) <= 4.0 * std::max(b.std_error, 1e-6));
  const double sigma = std::hypot(a.std_error, b.std_error);
  CHECK(std::abs(a.value - b.value) <= 4.0 * std::max(sigma, 1e-6));
}

TEST_CASE("QPSK Monte Carlo single user matches the BPSK curve per bit") {
  // Unit-energy QPSK splits power across quadratures; per-bit error equals
  // BPSK at half the SNR.
  const double g = db_to_linear(9.0);
  ErrorModelSpec spec = mc_spec(200000);
  spec.modulation = Modulation::QPSK;
  const BepEstimate est = mc_joint_ml_bep({g}, spec);
  const double exact = single_user_bep(0.5 * g);
  CHECK(std::abs(est.value - exact) <= 4.0 * std::max(est.std_error, 1e-6));
}
