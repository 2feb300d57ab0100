#include <doctest.h>

#include <cmath>

#include "noma/detection.hpp"
#include "noma/types.hpp"

using namespace noma;

TEST_CASE("two-user BPSK superposed constellation") {
  const JointHypothesisSet hyp = build_hypotheses({3.0, 1.0}, Modulation::BPSK);
  REQUIRE(hyp.n_hyp == 4);
  // User 0 is the most significant digit: h = 2*m0 + m1.
  CHECK(hyp.re[0] == doctest::Approx(4.0));   // (+,+)
  CHECK(hyp.re[1] == doctest::Approx(2.0));   // (+,-)
  CHECK(hyp.re[2] == doctest::Approx(-2.0));  // (-,+)
  CHECK(hyp.re[3] == doctest::Approx(-4.0));  // (-,-)
  for (int h = 0; h < 4; ++h) CHECK(hyp.im[static_cast<std::size_t>(h)] == 0.0);
  CHECK(hypothesis_symbol(hyp, 2, 0) == 1);
  CHECK(hypothesis_symbol(hyp, 2, 1) == 0);
}

TEST_CASE("QPSK symbols have unit energy") {
  const JointHypothesisSet hyp = build_hypotheses({1.0}, Modulation::QPSK);
  REQUIRE(hyp.n_hyp == 4);
  for (int h = 0; h < 4; ++h) {
    const double e = hyp.re[static_cast<std::size_t>(h)] * hyp.re[static_cast<std::size_t>(h)] +
                     hyp.im[static_cast<std::size_t>(h)] * hyp.im[static_cast<std::size_t>(h)];
    CHECK(e == doctest::Approx(1.0).epsilon(1e-15));
  }
  // m = 2*b0 + b1, bit 0 on the real axis, bit 1 on the imaginary axis.
  CHECK(hyp.re[0] > 0.0);
  CHECK(hyp.im[0] > 0.0);
  CHECK(hyp.re[3] < 0.0);
  CHECK(hyp.im[3] < 0.0);
}

TEST_CASE("noiseless detection recovers the transmitted symbols") {
  const JointHypothesisSet hyp = build_hypotheses({2.0, 0.7}, Modulation::BPSK);
  for (int h = 0; h < hyp.n_hyp; ++h) {
    CHECK(nearest_hypothesis(hyp, hyp.re[static_cast<std::size_t>(h)],
                             hyp.im[static_cast<std::size_t>(h)]) == h);
  }
  const auto symbols = joint_ml_detect(-2.7, 0.0, {2.0, 0.7}, Modulation::BPSK);
  CHECK(symbols[0] == 1);
  CHECK(symbols[1] == 1);
}

TEST_CASE("exact ties resolve to the lowest hypothesis index") {
  // Equal amplitudes put hypotheses 1 = (+,-) and 2 = (-,+) both at zero.
  const JointHypothesisSet hyp = build_hypotheses({1.0, 1.0}, Modulation::BPSK);
  CHECK(hyp.re[1] == 0.0);
  CHECK(hyp.re[2] == 0.0);
  CHECK(nearest_hypothesis(hyp, 0.0, 0.0) == 1);
}

TEST_CASE("packed symbol words map to hypothesis indices") {
  const JointHypothesisSet hyp = build_hypotheses({1.0, 2.0, 3.0}, Modulation::BPSK);
  // Word bit j carries user j's BPSK symbol; hypothesis digits put user 0 first.
  CHECK(hypothesis_from_word(0u, hyp) == 0);
  CHECK(hypothesis_from_word(0b001u, hyp) == 4);  // user 0 flipped
  CHECK(hypothesis_from_word(0b100u, hyp) == 1);  // user 2 flipped
  const JointHypothesisSet q = build_hypotheses({1.0}, Modulation::QPSK);
  CHECK(hypothesis_from_word(0b11u, q) == 3);
}

TEST_CASE("enumeration guards") {
  CHECK_THROWS_AS(build_hypotheses({}, Modulation::BPSK), std::invalid_argument);
  CHECK_THROWS_AS(build_hypotheses(std::vector<double>(21, 1.0), Modulation::BPSK),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_hypotheses(std::vector<double>(13, 1.0), Modulation::QPSK),
                  ResourceLimitError);
}
