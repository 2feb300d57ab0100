#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "noma/error_models.hpp"
#include "noma/scenario.hpp"

namespace noma {

/// Dense order-(k+1) tensor of tagged-user block error probabilities over
/// level indices (i0, i1, ..., ik); i0 is the tagged user, the trailing axes
/// are the interferers. Storage is row-major (i0 slowest). The tagged BLEP
/// is symmetric in the interferer axes, so Monte Carlo builds evaluate one
/// representative per interferer multiset and broadcast it.
struct CollisionErrorTensor {
  int order = 1;  // k+1 users
  Index q_count = 0;
  std::vector<double> values;
  BlockConfig block;
  ErrorModelSpec spec;          // how the entries were produced: model, trials, seed
  std::uint64_t cache_key = 0;  // grid/spec fingerprint

  std::size_t flat_size() const;
  double value1(Index i0) const;
  double value2(Index i0, Index i1) const;
  Vector as_vector() const;  // order 1
  Matrix as_matrix() const;  // order 2; row = tagged index, col = interferer
  void validate() const;
};

std::uint64_t tensor_cache_key(const PowerLevelGrid& grid, int k, const BlockConfig& block,
                               const ErrorModelSpec& spec);

/// Builds the order-(k+1) tensor for k interferers. Total entry count is
/// capped at 10^7. Entries are deterministic functions of (spec.mc_seed,
/// canonical entry index), so evaluation order and parallel scheduling do
/// not change the result.
CollisionErrorTensor build_tensor(const PowerLevelGrid& grid, int k, const BlockConfig& block,
                                  const ErrorModelSpec& spec);

/// As build_tensor, with a read-through on-disk cache (used for Monte Carlo
/// tensors only; empty dir disables caching).
CollisionErrorTensor build_tensor_cached(const PowerLevelGrid& grid, int k,
                                         const BlockConfig& block, const ErrorModelSpec& spec,
                                         const std::string& cache_dir);

/// Everything needed to evaluate the truncated average BLEP: one tensor per
/// collision order k = 0..k_max plus the Poisson weights.
struct ObjectiveBundle {
  PowerLevelGrid grid;
  TrafficModel traffic;
  BlockConfig block;
  std::vector<CollisionErrorTensor> tensors;

  void validate() const;
};

ObjectiveBundle build_bundle(const PowerLevelGrid& grid, const TrafficModel& traffic,
                             const BlockConfig& block, const ErrorModelSpec& spec,
                             const std::string& cache_dir = "");

/// Average tagged-user BLEP given exactly k interferers, all users drawing
/// levels i.i.d. from `probs`: contracts every axis of the order-(k+1)
/// tensor with `probs`.
double avg_blep_k(const Vector& probs, const CollisionErrorTensor& tensor);

/// Poisson-weighted truncated average BLEP. With `include_residual_mass`
/// the truncated tail k > k_max is charged as certain block failure, which
/// is what the slot simulator measures.
double truncated_blep(const Vector& probs, const ObjectiveBundle& bundle,
                      bool include_residual_mass = false);

/// Contracts the leading (order-2) axes with `fixed`, leaving a quadratic
/// form over the trailing two axes: entry (r, c) = sum over leading indices
/// of prod(fixed) * T[leading..., r, c]. Requires order >= 3.
Matrix condition_tensor(const CollisionErrorTensor& tensor, const Vector& fixed);

/// Contracts the trailing k interferer axes with `others`, leaving the
/// tagged user's average BLEP as a function of its own level index.
Vector contract_to_tagged(const CollisionErrorTensor& tensor, const Vector& others);

/// Expected decoded packets per slot, conditioned on at least one active
/// user: sum over k of p(k) * (k+1) * (1 - avg_blep_k). Collisions beyond
/// k_max decode nothing and contribute zero.
double throughput(const Vector& probs, const ObjectiveBundle& bundle);

double poisson_residual_mass(const TrafficModel& traffic);

/// Writes an order-1 or order-2 tensor as CSV (level indices plus value).
void export_tensor_csv(const CollisionErrorTensor& tensor, std::ostream& os);

}  // namespace noma
