#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "noma/types.hpp"

namespace noma {

enum class Modulation { BPSK, QPSK };

const char* to_string(Modulation m);
Modulation modulation_from_string(const std::string& s);

/// The Q received-SNR levels at the base station, increasing in q, and the
/// target mean received SNR. All internal math is linear-domain; dB values
/// are kept alongside for reporting.
struct PowerLevelGrid {
  Index q_count = 0;
  Vector snr_linear;       // gamma_q, strictly increasing
  Vector snr_db;           // 10*log10(gamma_q)
  double target_mean_snr = 0.0;  // gamma_bar, linear

  void validate() const;
  /// Replaces the target mean SNR; must stay within [min, max] level.
  PowerLevelGrid with_target_mean(double gamma_bar) const;
};

/// gamma_{q,dB} = gamma1_db + (q-1)*delta_db, target mean = arithmetic mean
/// of the linear SNRs.
PowerLevelGrid build_snr_grid(double gamma1_db, double delta_db, Index q_count);

/// Same grid specified by its endpoints: delta = (gammaQ - gamma1)/(Q-1) dB.
PowerLevelGrid build_snr_grid_endpoints(double gamma1_db, double gammaQ_db, Index q_count);

/// Poisson(lambda) collision weights p(k) = exp(-lambda) lambda^k / k! for
/// k = 0..k_max. Raw weights, not renormalized over the truncation.
struct TrafficModel {
  double lambda = 0.0;
  int k_max = 0;       // detector handles up to k_max extra colliding packets
  Vector weights;      // length k_max+1

  void validate() const;
};

TrafficModel poisson_weights(double lambda, int k_max);

struct BlockConfig {
  int bits_per_block = 1;  // L
  Modulation modulation = Modulation::BPSK;

  void validate() const;
};

/// Probability vector over the Q levels. `mean_constrained` records whether
/// the producer imposed the mean-SNR equality (C2); C1 and C3 always apply.
struct LevelDistribution {
  Vector probs;
  bool mean_constrained = false;

  Index size() const { return probs.size(); }
  double sum_residual() const { return probs.sum() - 1.0; }
  double mean_snr(const PowerLevelGrid& grid) const { return probs.dot(grid.snr_linear); }
  void validate() const;
};

LevelDistribution uniform_distribution(Index q_count);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace noma
