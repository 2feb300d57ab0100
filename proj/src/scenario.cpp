#include "noma/scenario.hpp"

#include <cmath>

namespace noma {

const char* to_string(Modulation m) {
  return m == Modulation::BPSK ? "BPSK" : "QPSK";
}

Modulation modulation_from_string(const std::string& s) {
  if (s == "BPSK" || s == "bpsk") return Modulation::BPSK;
  if (s == "QPSK" || s == "qpsk") return Modulation::QPSK;
  throw std::invalid_argument("unknown modulation: " + s);
}

void PowerLevelGrid::validate() const {
  require(q_count >= 2, "grid needs at least two levels");
  require(snr_linear.size() == q_count && snr_db.size() == q_count,
          "grid vectors must have q_count entries");
  for (Index q = 0; q < q_count; ++q) {
    require(snr_linear[q] > 0.0, "SNR levels must be positive");
    const double back = std::pow(10.0, snr_db[q] / 10.0);
    require(std::abs(back - snr_linear[q]) <= 1e-12 * snr_linear[q],
            "snr_db and snr_linear disagree");
  }
  for (Index q = 1; q < q_count; ++q)
    require(snr_linear[q] > snr_linear[q - 1], "SNR levels must be strictly increasing");
  require(target_mean_snr >= snr_linear[0] && target_mean_snr <= snr_linear[q_count - 1],
          "target mean SNR outside level range (C2 infeasible)");
}

PowerLevelGrid PowerLevelGrid::with_target_mean(double gamma_bar) const {
  PowerLevelGrid g = *this;
  g.target_mean_snr = gamma_bar;
  g.validate();
  return g;
}

PowerLevelGrid build_snr_grid(double gamma1_db, double delta_db, Index q_count) {
  require(q_count >= 2, "q_count must be >= 2");
  require(delta_db > 0.0, "delta_db must be positive");
  PowerLevelGrid g;
  g.q_count = q_count;
  g.snr_db = Vector::LinSpaced(q_count, gamma1_db, gamma1_db + delta_db * double(q_count - 1));
  // LinSpaced endpoint arithmetic can drift at the last ulp; rebuild exactly.
  for (Index q = 0; q < q_count; ++q) g.snr_db[q] = gamma1_db + delta_db * double(q);
  g.snr_linear = g.snr_db.unaryExpr([](double db) { return db_to_linear(db); });
  g.target_mean_snr = g.snr_linear.mean();
  g.validate();
  return g;
}

PowerLevelGrid build_snr_grid_endpoints(double gamma1_db, double gammaQ_db, Index q_count) {
  require(q_count >= 2, "q_count must be >= 2");
  require(gammaQ_db > gamma1_db, "gammaQ_db must exceed gamma1_db");
  return build_snr_grid(gamma1_db, (gammaQ_db - gamma1_db) / double(q_count - 1), q_count);
}

void TrafficModel::validate() const {
  require(lambda >= 0.0, "lambda must be nonnegative");
  require(k_max >= 0, "k_max must be nonnegative");
  require(weights.size() == k_max + 1, "weights must have k_max+1 entries");
}

TrafficModel poisson_weights(double lambda, int k_max) {
  require(lambda >= 0.0, "lambda must be nonnegative");
  require(k_max >= 0, "k_max must be nonnegative");
  TrafficModel t;
  t.lambda = lambda;
  t.k_max = k_max;
  t.weights.resize(k_max + 1);
  double w = std::exp(-lambda);
  for (int k = 0; k <= k_max; ++k) {
    if (k > 0) w *= lambda / double(k);
    t.weights[k] = w;
  }
  return t;
}

void BlockConfig::validate() const {
  require(bits_per_block >= 1, "bits_per_block must be >= 1");
}

void LevelDistribution::validate() const {
  require(probs.size() >= 1, "distribution must be nonempty");
  require(std::abs(sum_residual()) <= 1e-9, "C1 violated: probabilities must sum to 1");
  require(probs.minCoeff() >= -1e-12, "C3 violated: negative probability");
}

LevelDistribution uniform_distribution(Index q_count) {
  require(q_count >= 1, "q_count must be >= 1");
  LevelDistribution d;
  d.probs = Vector::Constant(q_count, 1.0 / double(q_count));
  d.mean_constrained = true;
  return d;
}

}  // namespace noma
