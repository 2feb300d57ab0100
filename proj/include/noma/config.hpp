#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "noma/scenario.hpp"

namespace noma {

/// Flat key=value scenario file: one pair per line, '#' starts a comment,
/// blank lines skipped. Unknown keys are errors. The grid spacing comes
/// from delta_db or gammaQ_db; giving both with inconsistent values is an
/// error, giving neither leaves the grid unspecified.
struct ScenarioConfig {
  double gamma1_db = 15.0;
  std::optional<double> delta_db;
  std::optional<double> gammaQ_db;
  Index q_count = 13;
  double lambda = 0.5;
  int k_max = 1;
  int block_bits = 100;
  Modulation modulation = Modulation::BPSK;
  std::uint64_t seed = 1;
  long long slots = 1000000;

  void validate() const;

  /// Grid at the configured q_count.
  PowerLevelGrid grid() const { return grid_for(q_count); }
  /// Grid with the same anchors at a different Q. With gammaQ_db the
  /// endpoints stay fixed and the spacing shrinks as Q grows (the sweep
  /// convention); with delta_db the spacing stays fixed.
  PowerLevelGrid grid_for(Index q) const;
  TrafficModel traffic() const { return poisson_weights(lambda, k_max); }
  BlockConfig block() const { return {block_bits, modulation}; }
};

ScenarioConfig parse_scenario_config(const std::string& text);
ScenarioConfig load_scenario_config(const std::string& path);

}  // namespace noma
