#include "noma/error_models.hpp"

#include <bit>
#include <cmath>

#include "noma/detection.hpp"
#include "noma/rng.hpp"
#include "noma/types.hpp"

namespace noma {

std::string to_string(ErrorMode mode) {
  return mode == ErrorMode::Analytic ? "analytic" : "mc";
}

std::string to_string(BlockModel model) {
  return model == BlockModel::IndependentBits ? "independent-bits" : "direct-block";
}

void ErrorModelSpec::validate() const {
  require(mc_trials >= 10000, "mc_trials must be at least 10^4");
}

double single_user_bep(double gamma) {
  require(gamma >= 0.0, "SNR must be non-negative");
  return 0.5 * std::erfc(std::sqrt(gamma));
}

double two_user_bep(double gamma0, double gamma1) {
  require(gamma0 >= 0.0 && gamma1 >= 0.0, "SNR must be non-negative");
  const double a = std::sqrt(gamma0);
  const double b = std::sqrt(gamma1);
  if (gamma0 > gamma1) return 0.25 * (std::erfc(a + b) + std::erfc(a - b));
  if (gamma0 < gamma1) {
    const double v = 0.25 * (2.0 * std::erfc(a) + std::erfc(b - a) - std::erfc(2.0 * b - a) -
                             std::erfc(a + b) + std::erfc(2.0 * b + a));
    return std::min(1.0, std::max(0.0, v));
  }
  return 0.25 * (std::erfc(2.0 * a) + 1.0);
}

double bep_to_blep(double bep, int bits_per_block) {
  require(bits_per_block >= 1, "block length must be positive");
  require(bep >= 0.0 && bep <= 1.0, "bit error probability must lie in [0, 1]");
  if (bep == 0.0) return 0.0;
  return -std::expm1(static_cast<double>(bits_per_block) * std::log1p(-bep));
}

BepEstimate mc_joint_ml_bep(const std::vector<double>& snrs, const ErrorModelSpec& spec,
                            std::uint64_t stream_salt) {
  require(!snrs.empty(), "collision needs at least one user");
  for (const double g : snrs) require(g >= 0.0, "SNR must be non-negative");
  spec.validate();

  std::vector<double> amps(snrs.size());
  for (std::size_t j = 0; j < snrs.size(); ++j) amps[j] = std::sqrt(snrs[j]);
  const JointHypothesisSet hyp = build_hypotheses(amps, spec.modulation);
  const int bps = bits_per_symbol(spec.modulation);
  const double sigma = std::sqrt(0.5);
  const std::uint64_t seed = mix_seed(spec.mc_seed, stream_salt);

  long long bit_errors = 0;
  for (long long t = 0; t < spec.mc_trials; ++t) {
    RandomStream rs(seed, static_cast<std::uint64_t>(t));
    const int h_true = hypothesis_from_word(rs.next_u32(), hyp);
    double y_re = hyp.re[static_cast<std::size_t>(h_true)];
    double y_im = hyp.im[static_cast<std::size_t>(h_true)];
    y_re += sigma * rs.next_gaussian();
    if (spec.modulation == Modulation::QPSK) y_im += sigma * rs.next_gaussian();
    const int h_hat = nearest_hypothesis(hyp, y_re, y_im);
    const int diff = hypothesis_symbol(hyp, h_true, 0) ^ hypothesis_symbol(hyp, h_hat, 0);
    bit_errors += std::popcount(static_cast<unsigned>(diff));
  }

  const double n_bits = static_cast<double>(spec.mc_trials) * bps;
  BepEstimate est;
  est.value = static_cast<double>(bit_errors) / n_bits;
  est.std_error = std::sqrt(est.value * (1.0 - est.value) / n_bits);
  return est;
}

namespace {

BepEstimate direct_block_blep(const std::vector<double>& amps, const BlockConfig& block,
                              const ErrorModelSpec& spec, std::uint64_t seed) {
  const JointHypothesisSet hyp = build_hypotheses(amps, spec.modulation);
  const int bps = bits_per_symbol(spec.modulation);
  const int periods = (block.bits_per_block + bps - 1) / bps;
  const double sigma = std::sqrt(0.5);

  long long block_errors = 0;
  for (long long t = 0; t < spec.mc_trials; ++t) {
    RandomStream rs(seed, static_cast<std::uint64_t>(t));
    bool failed = false;
    for (int p = 0; p < periods && !failed; ++p) {
      const int h_true = hypothesis_from_word(rs.next_u32(), hyp);
      double y_re = hyp.re[static_cast<std::size_t>(h_true)];
      double y_im = hyp.im[static_cast<std::size_t>(h_true)];
      y_re += sigma * rs.next_gaussian();
      if (spec.modulation == Modulation::QPSK) y_im += sigma * rs.next_gaussian();
      const int h_hat = nearest_hypothesis(hyp, y_re, y_im);
      int diff = hypothesis_symbol(hyp, h_true, 0) ^ hypothesis_symbol(hyp, h_hat, 0);
      const int use_bits = std::min(bps, block.bits_per_block - p * bps);
      // For a partial final QPSK period only the first (real-axis) bit counts.
      if (use_bits < bps) diff &= 0x2;
      failed = diff != 0;
    }
    block_errors += failed ? 1 : 0;
  }

  BepEstimate est;
  est.value = static_cast<double>(block_errors) / static_cast<double>(spec.mc_trials);
  est.std_error = std::sqrt(est.value * (1.0 - est.value) / static_cast<double>(spec.mc_trials));
  return est;
}

}  // namespace

BepEstimate collision_blep_estimate(const std::vector<double>& snrs, const BlockConfig& block,
                                    const ErrorModelSpec& spec, std::uint64_t stream_salt) {
  require(!snrs.empty(), "collision needs at least one user");
  require(block.modulation == spec.modulation, "block and error model disagree on modulation");
  block.validate();

  if (spec.mode == ErrorMode::Analytic) {
    if (spec.modulation != Modulation::BPSK || snrs.size() > 2) {
      throw UnsupportedModelError("analytic error model covers BPSK with at most one interferer");
    }
    const double bep =
        snrs.size() == 1 ? single_user_bep(snrs[0]) : two_user_bep(snrs[0], snrs[1]);
    return {bep_to_blep(bep, block.bits_per_block), 0.0};
  }

  if (spec.block_model == BlockModel::IndependentBits) {
    const BepEstimate bep = mc_joint_ml_bep(snrs, spec, stream_salt);
    BepEstimate est;
    est.value = bep_to_blep(bep.value, block.bits_per_block);
    est.std_error = static_cast<double>(block.bits_per_block) *
                    std::pow(1.0 - bep.value, block.bits_per_block - 1) * bep.std_error;
    return est;
  }

  for (const double g : snrs) require(g >= 0.0, "SNR must be non-negative");
  spec.validate();
  std::vector<double> amps(snrs.size());
  for (std::size_t j = 0; j < snrs.size(); ++j) amps[j] = std::sqrt(snrs[j]);
  return direct_block_blep(amps, block, spec, mix_seed(spec.mc_seed, stream_salt));
}

double collision_blep(const std::vector<double>& snrs, const BlockConfig& block,
                      const ErrorModelSpec& spec, std::uint64_t stream_salt) {
  return collision_blep_estimate(snrs, block, spec, stream_salt).value;
}

}  // namespace noma
