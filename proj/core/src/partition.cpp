#include "lsgda/partition.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "lsgda/errors.hpp"
#include "lsgda/rng.hpp"

namespace lsgda {

FederatedDataset partition_by_label(const Vec64& features,
                                    const std::vector<int32_t>& labels,
                                    int dim, const PartitionSpec& spec) {
  if (dim < 1) throw ConfigError("partition: dim must be >= 1");
  if (spec.n_nodes < 1 || spec.shards_per_node < 1) {
    throw ConfigError("partition: n_nodes and shards_per_node must be >= 1");
  }
  const auto sd = static_cast<size_t>(dim);
  const size_t m = labels.size();
  if (features.size() != m * sd) {
    throw DimensionError("partition: feature size does not match count * dim");
  }
  const size_t n_shards =
      static_cast<size_t>(spec.n_nodes) *
      static_cast<size_t>(spec.shards_per_node);
  if (m < n_shards) {
    throw DataError("partition: " + std::to_string(m) + " samples cannot fill " +
                    std::to_string(n_shards) + " shards");
  }

  std::vector<size_t> order(m);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return labels[a] < labels[b];
  });

  // First (m mod n_shards) shards take one extra sample.
  const size_t base = m / n_shards;
  const size_t rem = m % n_shards;
  std::vector<size_t> shard_start(n_shards + 1, 0);
  for (size_t s = 0; s < n_shards; ++s) {
    shard_start[s + 1] = shard_start[s] + base + (s < rem ? 1 : 0);
  }

  std::vector<size_t> deal(n_shards);
  std::iota(deal.begin(), deal.end(), size_t{0});
  RngStream rng(derive_worker_seed(spec.seed, 0));
  for (size_t i = n_shards - 1; i > 0; --i) {
    const auto j = static_cast<size_t>(rng.bounded(i + 1));
    std::swap(deal[i], deal[j]);
  }

  FederatedDataset ds;
  ds.kind = TaskKind::Classification;
  ds.dim = dim;
  ds.nodes.resize(static_cast<size_t>(spec.n_nodes));
  for (int node = 0; node < spec.n_nodes; ++node) {
    DataBlock& blk = ds.nodes[static_cast<size_t>(node)];
    for (int k = 0; k < spec.shards_per_node; ++k) {
      const size_t s =
          deal[static_cast<size_t>(node) * spec.shards_per_node +
               static_cast<size_t>(k)];
      for (size_t pos = shard_start[s]; pos < shard_start[s + 1]; ++pos) {
        const size_t src = order[pos];
        blk.features.insert(blk.features.end(),
                            features.begin() +
                                static_cast<std::ptrdiff_t>(src * sd),
                            features.begin() +
                                static_cast<std::ptrdiff_t>((src + 1) * sd));
        blk.labels.push_back(labels[src]);
      }
    }
  }
  ds.validate();
  return ds;
}

} // namespace lsgda
