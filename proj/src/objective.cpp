#include "noma/objective.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "noma/csv.hpp"
#include "noma/types.hpp"

namespace noma {

namespace {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr std::size_t kMaxTensorEntries = 10'000'000;

std::size_t pow_size(Index q, int order) {
  std::size_t n = 1;
  for (int i = 0; i < order; ++i) {
    if (n > kMaxTensorEntries / static_cast<std::size_t>(q) + 1)
      throw ResourceLimitError("tensor entry count exceeds the tractability cap");
    n *= static_cast<std::size_t>(q);
  }
  return n;
}

void fnv_mix(std::uint64_t& h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xFFu;
    h *= 0x100000001B3ull;
  }
}

std::uint64_t double_bits(double d) {
  std::uint64_t u;
  static_assert(sizeof(u) == sizeof(d));
  std::memcpy(&u, &d, sizeof(u));
  return u;
}

}  // namespace

std::size_t CollisionErrorTensor::flat_size() const {
  return pow_size(q_count, order);
}

double CollisionErrorTensor::value1(Index i0) const {
  require(order == 1, "value1 needs an order-1 tensor");
  return values[static_cast<std::size_t>(i0)];
}

double CollisionErrorTensor::value2(Index i0, Index i1) const {
  require(order == 2, "value2 needs an order-2 tensor");
  return values[static_cast<std::size_t>(i0 * q_count + i1)];
}

Vector CollisionErrorTensor::as_vector() const {
  require(order == 1, "as_vector needs an order-1 tensor");
  return Eigen::Map<const Vector>(values.data(), q_count);
}

Matrix CollisionErrorTensor::as_matrix() const {
  require(order == 2, "as_matrix needs an order-2 tensor");
  return Eigen::Map<const RowMajorMatrix>(values.data(), q_count, q_count);
}

void CollisionErrorTensor::validate() const {
  require(order >= 1, "tensor order must be >= 1");
  require(q_count >= 1, "tensor needs at least one level");
  require(values.size() == flat_size(), "tensor storage size mismatch");
  for (const double v : values)
    require(std::isfinite(v) && v >= 0.0 && v <= 1.0, "tensor entries must be probabilities");
}

std::uint64_t tensor_cache_key(const PowerLevelGrid& grid, int k, const BlockConfig& block,
                               const ErrorModelSpec& spec) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  fnv_mix(h, 0x6E6F6D6131ull);  // format tag
  fnv_mix(h, static_cast<std::uint64_t>(grid.q_count));
  for (Index q = 0; q < grid.q_count; ++q) fnv_mix(h, double_bits(grid.snr_linear[q]));
  fnv_mix(h, static_cast<std::uint64_t>(k));
  fnv_mix(h, static_cast<std::uint64_t>(block.bits_per_block));
  fnv_mix(h, static_cast<std::uint64_t>(block.modulation));
  fnv_mix(h, static_cast<std::uint64_t>(spec.modulation));
  fnv_mix(h, static_cast<std::uint64_t>(spec.mode));
  fnv_mix(h, static_cast<std::uint64_t>(spec.mc_trials));
  fnv_mix(h, spec.mc_seed);
  fnv_mix(h, static_cast<std::uint64_t>(spec.block_model));
  return h;
}

CollisionErrorTensor build_tensor(const PowerLevelGrid& grid, int k, const BlockConfig& block,
                                  const ErrorModelSpec& spec) {
  grid.validate();
  block.validate();
  require(k >= 0, "interferer count must be non-negative");
  const int order = k + 1;
  const Index q = grid.q_count;
  const std::size_t n = pow_size(q, order);
  if (n > kMaxTensorEntries) throw ResourceLimitError("tensor entry count exceeds the tractability cap");

  CollisionErrorTensor t;
  t.order = order;
  t.q_count = q;
  t.block = block;
  t.spec = spec;
  t.cache_key = tensor_cache_key(grid, k, block, spec);
  t.values.assign(n, 0.0);

  // One evaluation per (tagged level, interferer multiset); the canonical
  // flat index (sorted tail) doubles as the Monte Carlo stream salt.
  std::unordered_map<std::size_t, double> canonical;
  std::vector<Index> idx(static_cast<std::size_t>(order));
  std::vector<double> snrs(static_cast<std::size_t>(order));
  for (std::size_t flat = 0; flat < n; ++flat) {
    std::size_t rem = flat;
    for (int ax = order - 1; ax >= 0; --ax) {
      idx[static_cast<std::size_t>(ax)] = static_cast<Index>(rem % static_cast<std::size_t>(q));
      rem /= static_cast<std::size_t>(q);
    }
    std::sort(idx.begin() + 1, idx.end());
    std::size_t canon = 0;
    for (int ax = 0; ax < order; ++ax)
      canon = canon * static_cast<std::size_t>(q) + static_cast<std::size_t>(idx[static_cast<std::size_t>(ax)]);
    auto it = canonical.find(canon);
    if (it == canonical.end()) {
      for (int ax = 0; ax < order; ++ax)
        snrs[static_cast<std::size_t>(ax)] = grid.snr_linear[idx[static_cast<std::size_t>(ax)]];
      const double v = collision_blep(snrs, block, spec, static_cast<std::uint64_t>(canon));
      it = canonical.emplace(canon, v).first;
    }
    t.values[flat] = it->second;
  }
  t.validate();
  return t;
}

namespace {

const char* const kCacheFormatTag = "noma-tensor v1";

std::string cache_path(const std::string& dir, std::uint64_t key) {
  char name[40];
  std::snprintf(name, sizeof(name), "tensor-%016" PRIx64 ".txt", key);
  return (std::filesystem::path(dir) / name).string();
}

bool load_cached_tensor(const std::string& path, const PowerLevelGrid& grid, int k,
                        const BlockConfig& block, const ErrorModelSpec& spec,
                        CollisionErrorTensor& out) {
  std::ifstream in(path);
  if (!in) return false;
  std::string line;
  if (!std::getline(in, line) || line != kCacheFormatTag) return false;
  std::uint64_t key = 0;
  std::size_t count = 0;
  int order = 0;
  long long q = 0;
  if (!(in >> line >> std::hex >> key >> std::dec)) return false;
  if (line != "key") return false;
  if (!(in >> line >> q) || line != "q") return false;
  if (!(in >> line >> order) || line != "order") return false;
  if (!(in >> line >> count) || line != "values") return false;
  if (key != tensor_cache_key(grid, k, block, spec)) return false;
  if (q != grid.q_count || order != k + 1) return false;

  CollisionErrorTensor t;
  t.order = order;
  t.q_count = grid.q_count;
  t.block = block;
  t.spec = spec;
  t.cache_key = key;
  if (count != pow_size(t.q_count, order)) return false;
  t.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!(in >> line)) return false;
    t.values[i] = std::strtod(line.c_str(), nullptr);
  }
  t.validate();
  out = std::move(t);
  return true;
}

void store_cached_tensor(const std::string& path, const CollisionErrorTensor& t) {
  std::ostringstream os;
  os << kCacheFormatTag << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, t.cache_key);
  os << "key " << buf << "\n";
  os << "q " << t.q_count << "\n";
  os << "order " << t.order << "\n";
  os << "values " << t.values.size() << "\n";
  for (const double v : t.values) {
    std::snprintf(buf, sizeof(buf), "%a", v);
    os << buf << "\n";
  }
  // Write-then-rename so a concurrent reader never sees a partial file.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream outf(tmp, std::ios::trunc);
    if (!outf) return;
    outf << os.str();
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) std::filesystem::remove(tmp, ec);
}

}  // namespace

CollisionErrorTensor build_tensor_cached(const PowerLevelGrid& grid, int k,
                                         const BlockConfig& block, const ErrorModelSpec& spec,
                                         const std::string& cache_dir) {
  if (cache_dir.empty() || spec.mode != ErrorMode::MonteCarlo)
    return build_tensor(grid, k, block, spec);
  const std::string path = cache_path(cache_dir, tensor_cache_key(grid, k, block, spec));
  CollisionErrorTensor t;
  if (load_cached_tensor(path, grid, k, block, spec, t)) return t;
  t = build_tensor(grid, k, block, spec);
  std::error_code ec;
  std::filesystem::create_directories(cache_dir, ec);
  store_cached_tensor(path, t);
  return t;
}

void ObjectiveBundle::validate() const {
  grid.validate();
  traffic.validate();
  block.validate();
  require(tensors.size() == static_cast<std::size_t>(traffic.k_max) + 1,
          "bundle needs one tensor per collision order 0..k_max");
  for (std::size_t k = 0; k < tensors.size(); ++k) {
    tensors[k].validate();
    require(tensors[k].order == static_cast<int>(k) + 1, "tensor order out of sequence");
    require(tensors[k].q_count == grid.q_count, "tensor level count mismatch");
  }
}

ObjectiveBundle build_bundle(const PowerLevelGrid& grid, const TrafficModel& traffic,
                             const BlockConfig& block, const ErrorModelSpec& spec,
                             const std::string& cache_dir) {
  ObjectiveBundle b;
  b.grid = grid;
  b.traffic = traffic;
  b.block = block;
  b.tensors.reserve(static_cast<std::size_t>(traffic.k_max) + 1);
  for (int k = 0; k <= traffic.k_max; ++k)
    b.tensors.push_back(build_tensor_cached(grid, k, block, spec, cache_dir));
  b.validate();
  return b;
}

double avg_blep_k(const Vector& probs, const CollisionErrorTensor& tensor) {
  require(probs.size() == tensor.q_count, "distribution length mismatch");
  const Index q = tensor.q_count;
  std::vector<double> cur = tensor.values;
  std::size_t len = cur.size();
  for (int ax = 0; ax < tensor.order; ++ax) {
    len /= static_cast<std::size_t>(q);
    Eigen::Map<const RowMajorMatrix> m(cur.data(), static_cast<Index>(len), q);
    const Vector next = m * probs;
    cur.assign(next.data(), next.data() + next.size());
  }
  return cur[0];
}

double truncated_blep(const Vector& probs, const ObjectiveBundle& bundle,
                      bool include_residual_mass) {
  bundle.validate();
  double total = include_residual_mass ? poisson_residual_mass(bundle.traffic) : 0.0;
  for (int k = 0; k <= bundle.traffic.k_max; ++k)
    total += bundle.traffic.weights[k] * avg_blep_k(probs, bundle.tensors[static_cast<std::size_t>(k)]);
  return total;
}

Matrix condition_tensor(const CollisionErrorTensor& tensor, const Vector& fixed) {
  require(tensor.order >= 3, "conditioning needs an order >= 3 tensor");
  require(fixed.size() == tensor.q_count, "distribution length mismatch");
  const Index q = tensor.q_count;
  std::vector<double> cur = tensor.values;
  std::size_t len = cur.size();
  for (int ax = 0; ax < tensor.order - 2; ++ax) {
    len /= static_cast<std::size_t>(q);
    Eigen::Map<const RowMajorMatrix> m(cur.data(), q, static_cast<Index>(len));
    const Vector next = m.transpose() * fixed;
    cur.assign(next.data(), next.data() + next.size());
  }
  return Eigen::Map<const RowMajorMatrix>(cur.data(), q, q);
}

Vector contract_to_tagged(const CollisionErrorTensor& tensor, const Vector& others) {
  require(others.size() == tensor.q_count, "distribution length mismatch");
  const Index q = tensor.q_count;
  std::vector<double> cur = tensor.values;
  std::size_t len = cur.size();
  for (int ax = 0; ax < tensor.order - 1; ++ax) {
    len /= static_cast<std::size_t>(q);
    Eigen::Map<const RowMajorMatrix> m(cur.data(), static_cast<Index>(len), q);
    const Vector next = m * others;
    cur.assign(next.data(), next.data() + next.size());
  }
  return Eigen::Map<const Vector>(cur.data(), q);
}

double throughput(const Vector& probs, const ObjectiveBundle& bundle) {
  bundle.validate();
  double total = 0.0;
  for (int k = 0; k <= bundle.traffic.k_max; ++k) {
    const double blep = avg_blep_k(probs, bundle.tensors[static_cast<std::size_t>(k)]);
    total += bundle.traffic.weights[k] * static_cast<double>(k + 1) * (1.0 - blep);
  }
  return total;
}

double poisson_residual_mass(const TrafficModel& traffic) {
  traffic.validate();
  return std::max(0.0, 1.0 - traffic.weights.sum());
}

void export_tensor_csv(const CollisionErrorTensor& tensor, std::ostream& os) {
  require(tensor.order <= 2, "CSV export covers order 1 and 2 tensors only");
  if (tensor.order == 1) {
    os << "i0,blep\n";
    for (Index i = 0; i < tensor.q_count; ++i)
      os << i << ',' << csv_cell(tensor.value1(i)) << '\n';
    return;
  }
  os << "i0,i1,blep\n";
  for (Index i = 0; i < tensor.q_count; ++i)
    for (Index j = 0; j < tensor.q_count; ++j)
      os << i << ',' << j << ',' << csv_cell(tensor.value2(i, j)) << '\n';
}

}  // namespace noma
