#include "noma/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <vector>

#include "noma/detection.hpp"
#include "noma/rng.hpp"
#include "noma/stats.hpp"

namespace noma {

namespace {

constexpr int kPoissonDrawCap = 200;

int draw_poisson(RandomStream& rs, double lambda) {
  const double u = rs.next_uniform_open();
  int k = 0;
  double p = std::exp(-lambda);
  double cdf = p;
  while (u > cdf && k < kPoissonDrawCap) {
    ++k;
    p *= lambda / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

Index draw_level(RandomStream& rs, const LevelDistribution& dist) {
  const double u = rs.next_uniform();  // in (0, 1], so cdf >= u always lands
  double cdf = 0.0;
  for (Index q = 0; q + 1 < dist.size(); ++q) {
    cdf += dist.probs[q];
    if (u <= cdf) return q;
  }
  return dist.size() - 1;
}

double binomial_half_width(long long errors, long long trials, const SimOptions& options) {
  if (trials <= 0) return 0.0;
  if (!options.exact_ci) return normal_ci_half_width(errors, trials, options.confidence);
  const Interval ci = clopper_pearson(errors, trials, options.confidence);
  const double p = static_cast<double>(errors) / static_cast<double>(trials);
  return std::max(ci.hi - p, p - ci.lo);
}

}  // namespace

SlotOutcome simulate_slot(const PowerLevelGrid& grid, const LevelDistribution& dist,
                          const TrafficModel& traffic, const BlockConfig& block,
                          std::uint64_t seed, std::uint64_t slot_index) {
  RandomStream rs(seed, slot_index);
  const int k = draw_poisson(rs, traffic.lambda);
  const int n = k + 1;

  SlotOutcome out;
  out.num_active = n;
  out.chosen_levels.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) out.chosen_levels[static_cast<std::size_t>(j)] = draw_level(rs, dist);

  if (k > traffic.k_max) {
    out.overloaded = true;
    out.block_success.assign(static_cast<std::size_t>(n), false);
    return out;
  }

  std::vector<double> amps(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    amps[static_cast<std::size_t>(j)] =
        std::sqrt(grid.snr_linear[out.chosen_levels[static_cast<std::size_t>(j)]]);
  const JointHypothesisSet hyp = build_hypotheses(amps, block.modulation);
  const int bps = bits_per_symbol(block.modulation);
  const int periods = (block.bits_per_block + bps - 1) / bps;
  const double sigma = std::sqrt(0.5);

  std::vector<bool> failed(static_cast<std::size_t>(n), false);
  for (int p = 0; p < periods; ++p) {
    const int h_true = hypothesis_from_word(rs.next_u32(), hyp);
    double y_re = hyp.re[static_cast<std::size_t>(h_true)];
    double y_im = hyp.im[static_cast<std::size_t>(h_true)];
    y_re += sigma * rs.next_gaussian();
    if (block.modulation == Modulation::QPSK) y_im += sigma * rs.next_gaussian();
    const int h_hat = nearest_hypothesis(hyp, y_re, y_im);
    const int use_bits = std::min(bps, block.bits_per_block - p * bps);
    for (int j = 0; j < n; ++j) {
      int diff = hypothesis_symbol(hyp, h_true, j) ^ hypothesis_symbol(hyp, h_hat, j);
      // A partial final QPSK period carries only the real-axis bit.
      if (use_bits < bps) diff &= 0x2;
      if (diff != 0) failed[static_cast<std::size_t>(j)] = true;
      if (j == 0) out.tagged_bit_errors += std::popcount(static_cast<unsigned>(diff));
    }
  }

  out.block_success.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) out.block_success[static_cast<std::size_t>(j)] = !failed[static_cast<std::size_t>(j)];
  return out;
}

SimStats simulate(const PowerLevelGrid& grid, const LevelDistribution& dist,
                  const TrafficModel& traffic, const BlockConfig& block, long long slots,
                  std::uint64_t seed, const SimOptions& options) {
  grid.validate();
  dist.validate();
  traffic.validate();
  block.validate();
  require(dist.size() == grid.q_count, "distribution length must match the grid");
  require(slots >= 1, "slot count must be positive");
  require(options.confidence > 0.0 && options.confidence < 1.0, "confidence must lie in (0, 1)");

  SimStats stats;
  stats.slots = slots;
  long long decoded_sq_sum = 0;
  for (long long s = 0; s < slots; ++s) {
    const SlotOutcome out =
        simulate_slot(grid, dist, traffic, block, seed, static_cast<std::uint64_t>(s));
    long long decoded = 0;
    if (out.overloaded) {
      ++stats.overload_slots;
      ++stats.tagged_block_errors;
    } else {
      if (!out.block_success[0]) ++stats.tagged_block_errors;
      stats.tagged_bit_errors += out.tagged_bit_errors;
      decoded = static_cast<long long>(
          std::count(out.block_success.begin(), out.block_success.end(), true));
    }
    stats.decoded_packets += decoded;
    decoded_sq_sum += decoded * decoded;
  }

  const double n_slots = static_cast<double>(slots);
  stats.empirical_blep = static_cast<double>(stats.tagged_block_errors) / n_slots;
  stats.blep_half_width = binomial_half_width(stats.tagged_block_errors, slots, options);

  const long long decodable = slots - stats.overload_slots;
  const long long decodable_bits = decodable * block.bits_per_block;
  stats.empirical_bep =
      decodable_bits > 0
          ? static_cast<double>(stats.tagged_bit_errors) / static_cast<double>(decodable_bits)
          : 0.0;
  stats.bep_half_width = binomial_half_width(stats.tagged_bit_errors, decodable_bits, options);

  stats.empirical_throughput = static_cast<double>(stats.decoded_packets) / n_slots;
  if (slots > 1) {
    const double mean = stats.empirical_throughput;
    const double var =
        (static_cast<double>(decoded_sq_sum) - n_slots * mean * mean) / (n_slots - 1.0);
    stats.throughput_half_width =
        z_for_confidence(options.confidence) * std::sqrt(std::max(var, 0.0) / n_slots);
  }
  return stats;
}

}  // namespace noma
