#pragma once

#include <cstdint>
#include <vector>

#include "noma/scenario.hpp"
#include "noma/types.hpp"

namespace noma {

/// One simulated slot. The tagged user is user 0; num_active counts it plus
/// the Poisson-distributed interferers.
struct SlotOutcome {
  int num_active = 0;
  std::vector<Index> chosen_levels;  // per user, tagged user first
  std::vector<bool> block_success;   // per user; all false when overloaded
  int tagged_bit_errors = 0;         // zero when overloaded (nothing decodable)
  bool overloaded = false;           // num_active exceeds detector capability K+1
};

struct SimOptions {
  double confidence = 0.95;
  bool exact_ci = false;  // Clopper-Pearson for BLEP/BEP instead of normal
};

/// Aggregates over a slot batch. empirical_blep covers the tagged user over
/// all slots (overloads count as failures); empirical_bep covers the tagged
/// user's bits over decodable slots only, since an overloaded slot produces
/// no bit decisions. Throughput is decoded packets per slot, its half-width
/// from the per-slot sample variance. With exact_ci the BLEP/BEP half-width
/// is the larger arm of the Clopper-Pearson interval.
struct SimStats {
  long long slots = 0;
  long long overload_slots = 0;
  long long tagged_block_errors = 0;
  long long tagged_bit_errors = 0;
  long long decoded_packets = 0;

  double empirical_blep = 0.0;
  double blep_half_width = 0.0;
  double empirical_bep = 0.0;
  double bep_half_width = 0.0;
  double empirical_throughput = 0.0;
  double throughput_half_width = 0.0;
};

/// Simulates one slot: k ~ Poisson(lambda) interferers, independent level
/// draws from dist, channel inversion making received SNRs exactly the
/// drawn levels, joint ML detection of the L-bit blocks with genie-aided
/// level knowledge. Slot (seed, slot_index) owns its counter stream, so
/// slots simulate independently in any order.
SlotOutcome simulate_slot(const PowerLevelGrid& grid, const LevelDistribution& dist,
                          const TrafficModel& traffic, const BlockConfig& block,
                          std::uint64_t seed, std::uint64_t slot_index);

/// Slot-level Monte Carlo of the full random-access chain. Deterministic
/// per seed regardless of scheduling.
SimStats simulate(const PowerLevelGrid& grid, const LevelDistribution& dist,
                  const TrafficModel& traffic, const BlockConfig& block, long long slots,
                  std::uint64_t seed, const SimOptions& options = {});

}  // namespace noma
