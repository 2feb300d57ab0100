#pragma once

#include <cstdint>
#include <string>

#include "noma/scenario.hpp"

namespace noma {

enum class ErrorMode { Analytic, MonteCarlo };
enum class BlockModel { IndependentBits, DirectBlock };

std::string to_string(ErrorMode mode);
std::string to_string(BlockModel model);

/// How collision error probabilities are produced. Analytic mode covers
/// BPSK with at most one interferer; Monte Carlo covers every supported
/// modulation and collision order.
struct ErrorModelSpec {
  Modulation modulation = Modulation::BPSK;
  ErrorMode mode = ErrorMode::Analytic;
  long long mc_trials = 100000;
  std::uint64_t mc_seed = 1;
  BlockModel block_model = BlockModel::IndependentBits;

  void validate() const;
};

struct BepEstimate {
  double value = 0.0;
  double std_error = 0.0;  // zero for analytic values
};

/// Exact BPSK bit error probability of an interference-free user at linear
/// SNR `gamma`.
double single_user_bep(double gamma);

/// Exact BPSK bit error probability of the tagged user under joint ML
/// detection with one interferer. `gamma0` is the tagged user's linear SNR,
/// `gamma1` the interferer's. The three branches (tagged stronger, tagged
/// weaker, exactly equal) are selected by exact floating-point comparison.
double two_user_bep(double gamma0, double gamma1);

/// Block error probability of an L-bit block under independent bit errors.
double bep_to_blep(double bep, int bits_per_block);

/// Monte Carlo estimate of the tagged user's bit error probability under
/// exhaustive joint ML detection. `snrs[0]` is the tagged user; the rest are
/// interferers. Unit noise spectral density; received amplitudes are
/// sqrt(snr). Deterministic for a given (seed, salt): trial t draws from
/// counter stream (seed ^ mixed salt, stream t), so any parallel schedule
/// reproduces the sequential result bit for bit.
BepEstimate mc_joint_ml_bep(const std::vector<double>& snrs, const ErrorModelSpec& spec,
                            std::uint64_t stream_salt = 0);

/// Tagged-user block error probability for a collision of `snrs.size()`
/// users. Analytic mode dispatches to the closed forms (BPSK, <= 2 users)
/// and applies the independent-bit block map; Monte Carlo mode either maps
/// an estimated BEP through the independent-bit model or simulates whole
/// blocks directly, per `spec.block_model`.
BepEstimate collision_blep_estimate(const std::vector<double>& snrs, const BlockConfig& block,
                                    const ErrorModelSpec& spec, std::uint64_t stream_salt = 0);

double collision_blep(const std::vector<double>& snrs, const BlockConfig& block,
                      const ErrorModelSpec& spec, std::uint64_t stream_salt = 0);

}  // namespace noma
