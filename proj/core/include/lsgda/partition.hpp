#pragma once

#include <cstdint>
#include <vector>

#include "lsgda/dataset.hpp"

namespace lsgda {

// Pathological label skew: samples are stable-sorted by label, cut into
// n_nodes * shards_per_node contiguous shards whose sizes differ by at most
// one, and the shards are dealt out with a seeded shuffle. With per-label
// counts that divide the shard size evenly, every node ends up with at most
// shards_per_node distinct labels.
struct PartitionSpec {
  int n_nodes = 2;
  int shards_per_node = 2;
  uint64_t seed = 1;
};

// features is row-major count x dim. Throws DataError when there are fewer
// samples than shards (some shard would be empty).
FederatedDataset partition_by_label(const Vec64& features,
                                    const std::vector<int32_t>& labels,
                                    int dim, const PartitionSpec& spec);

} // namespace lsgda
