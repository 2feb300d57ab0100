#include <doctest.h>

#include <cmath>

#include "noma/error_models.hpp"
#include "noma/scenario.hpp"
#include "noma/simulator.hpp"

using namespace noma;

namespace {

BlockConfig block_of(int bits) {
  BlockConfig b;
  b.bits_per_block = bits;
  return b;
}

LevelDistribution dist_of(std::initializer_list<double> probs) {
  LevelDistribution d;
  d.probs.resize(static_cast<Index>(probs.size()));
  Index i = 0;
  for (const double p : probs) d.probs[i++] = p;
  d.validate();
  return d;
}

}  // namespace

TEST_CASE("interference-free slots reproduce the single-user block error curve") {
  const PowerLevelGrid grid = build_snr_grid(6.0, 1.5, 3);
  const LevelDistribution dist = dist_of({0.5, 0.3, 0.2});
  const TrafficModel traffic = poisson_weights(0.0, 1);
  const BlockConfig block = block_of(20);

  const SimStats stats = simulate(grid, dist, traffic, block, 20000, 5);
  double expected = 0.0;
  for (Index q = 0; q < 3; ++q)
    expected += dist.probs[q] * bep_to_blep(single_user_bep(grid.snr_linear[q]), 20);
  CHECK(std::abs(stats.empirical_blep - expected) <= 2.5 * stats.blep_half_width);
  CHECK(stats.overload_slots == 0);

  // One active user per slot, so throughput and block success are the same
  // Bernoulli draw.
  CHECK(stats.empirical_throughput ==
        doctest::Approx(1.0 - stats.empirical_blep).epsilon(1e-12));
  CHECK(stats.decoded_packets == stats.slots - stats.tagged_block_errors);
}

TEST_CASE("interference-free bit errors match the closed-form bit error rate") {
  const PowerLevelGrid grid = build_snr_grid(6.0, 3.0, 2);
  const LevelDistribution dist = dist_of({1.0, 0.0});
  const TrafficModel traffic = poisson_weights(0.0, 1);
  const BlockConfig block = block_of(50);

  const SimStats stats = simulate(grid, dist, traffic, block, 20000, 9);
  const double expected = single_user_bep(grid.snr_linear[0]);
  CHECK(std::abs(stats.empirical_bep - expected) <= 2.5 * stats.bep_half_width);
  CHECK(stats.bep_half_width > 0.0);
  CHECK(stats.bep_half_width < 1e-3);
}

TEST_CASE("a high-SNR deterministic level decodes every slot") {
  const PowerLevelGrid grid = build_snr_grid(15.0, 1.5, 3);
  const LevelDistribution dist = dist_of({0.0, 0.0, 1.0});
  const TrafficModel traffic = poisson_weights(0.0, 1);
  const SimStats stats = simulate(grid, dist, traffic, block_of(20), 5000, 3);

  CHECK(stats.tagged_block_errors == 0);
  CHECK(stats.tagged_bit_errors == 0);
  CHECK(stats.empirical_blep == 0.0);
  CHECK(stats.empirical_bep == 0.0);
  CHECK(stats.empirical_throughput == 1.0);
  CHECK(stats.throughput_half_width == 0.0);
}

TEST_CASE("simulation is reproducible by seed") {
  const PowerLevelGrid grid = build_snr_grid(6.0, 1.5, 3);
  const LevelDistribution dist = dist_of({0.4, 0.3, 0.3});
  const TrafficModel traffic = poisson_weights(0.5, 1);
  const BlockConfig block = block_of(20);

  const SimStats a = simulate(grid, dist, traffic, block, 4000, 17);
  const SimStats b = simulate(grid, dist, traffic, block, 4000, 17);
  CHECK(a.tagged_block_errors == b.tagged_block_errors);
  CHECK(a.tagged_bit_errors == b.tagged_bit_errors);
  CHECK(a.overload_slots == b.overload_slots);
  CHECK(a.decoded_packets == b.decoded_packets);
  CHECK(a.empirical_blep == b.empirical_blep);

  const SimStats c = simulate(grid, dist, traffic, block, 4000, 18);
  CHECK(a.tagged_bit_errors != c.tagged_bit_errors);
}

TEST_CASE("overloaded slots are counted and fail the tagged block") {
  const PowerLevelGrid grid = build_snr_grid(10.0, 1.5, 3);
  const LevelDistribution dist = dist_of({0.4, 0.3, 0.3});
  const TrafficModel traffic = poisson_weights(4.0, 0);
  const SimStats stats = simulate(grid, dist, traffic, block_of(10), 5000, 23);

  const double p_over = 1.0 - std::exp(-4.0);
  const double frac = static_cast<double>(stats.overload_slots) / 5000.0;
  CHECK(std::abs(frac - p_over) <= 3.0 * std::sqrt(p_over * (1.0 - p_over) / 5000.0));
  CHECK(stats.tagged_block_errors >= stats.overload_slots);
  CHECK(stats.empirical_blep >= frac);
}

TEST_CASE("collision-free multi-user slots decode all active users at high SNR") {
  const PowerLevelGrid grid = build_snr_grid(15.0, 3.0, 3);
  const LevelDistribution dist = dist_of({1.0 / 3, 1.0 / 3, 1.0 / 3});
  const TrafficModel traffic = poisson_weights(0.8, 1);
  const SimStats stats = simulate(grid, dist, traffic, block_of(20), 20000, 31);

  // Lone users at >= 15 dB decode essentially always; colliding pairs land
  // between total loss (same level, tie floor) and full recovery, so the
  // mean decoded count is bracketed by the Poisson weights alone.
  const double w0 = std::exp(-0.8);
  const double w1 = 0.8 * std::exp(-0.8);
  CHECK(stats.empirical_throughput >= w0 - 5.0 * stats.throughput_half_width);
  CHECK(stats.empirical_throughput <= w0 * 1.0 + w1 * 2.0 + 5.0 * stats.throughput_half_width);
  CHECK(stats.throughput_half_width > 0.0);
  CHECK(stats.empirical_throughput > 0.5);
}

TEST_CASE("single-slot outcomes are structurally consistent") {
  const PowerLevelGrid grid = build_snr_grid(8.0, 1.5, 4);
  const LevelDistribution dist = dist_of({0.25, 0.25, 0.25, 0.25});
  const TrafficModel traffic = poisson_weights(3.0, 2);
  const BlockConfig block = block_of(12);

  bool saw_overload = false;
  bool saw_decoded = false;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const SlotOutcome out = simulate_slot(grid, dist, traffic, block, 77, s);
    REQUIRE(out.num_active >= 1);
    REQUIRE(out.chosen_levels.size() == static_cast<std::size_t>(out.num_active));
    for (const Index lvl : out.chosen_levels) {
      CHECK(lvl >= 0);
      CHECK(lvl < 4);
    }
    CHECK(out.overloaded == (out.num_active > traffic.k_max + 1));
    REQUIRE(out.block_success.size() == static_cast<std::size_t>(out.num_active));
    if (out.overloaded) {
      saw_overload = true;
      CHECK(out.tagged_bit_errors == 0);
      for (const bool ok : out.block_success) CHECK(!ok);
    } else {
      saw_decoded = true;
      CHECK(out.tagged_bit_errors <= block.bits_per_block);
    }
  }
  CHECK(saw_overload);
  CHECK(saw_decoded);
}

TEST_CASE("exact confidence intervals are at least as wide near zero counts") {
  const PowerLevelGrid grid = build_snr_grid(12.0, 1.5, 2);
  const LevelDistribution dist = dist_of({0.5, 0.5});
  const TrafficModel traffic = poisson_weights(0.0, 1);
  const BlockConfig block = block_of(20);

  SimOptions normal;
  SimOptions exact;
  exact.exact_ci = true;
  const SimStats a = simulate(grid, dist, traffic, block, 2000, 41, normal);
  const SimStats b = simulate(grid, dist, traffic, block, 2000, 41, exact);
  CHECK(a.tagged_block_errors == b.tagged_block_errors);
  CHECK(b.blep_half_width > 0.0);
  CHECK(b.blep_half_width >= a.blep_half_width);
}

TEST_CASE("simulation inputs are validated") {
  const PowerLevelGrid grid = build_snr_grid(6.0, 1.5, 3);
  const LevelDistribution dist = dist_of({0.5, 0.3, 0.2});
  const TrafficModel traffic = poisson_weights(0.5, 1);
  const BlockConfig block = block_of(10);

  CHECK_THROWS_AS(simulate(grid, dist, traffic, block, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(simulate(grid, dist_of({0.5, 0.5}), traffic, block, 10, 1),
                  std::invalid_argument);
  SimOptions bad;
  bad.confidence = 1.0;
  CHECK_THROWS_AS(simulate(grid, dist, traffic, block, 10, 1, bad), std::invalid_argument);
}
