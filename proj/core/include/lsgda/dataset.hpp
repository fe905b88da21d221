#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lsgda/vec.hpp"

namespace lsgda {

enum class TaskKind : uint8_t { Regression = 0, Classification = 1 };

// One node's samples. Regression blocks fill `targets`, classification
// blocks fill `labels`; the other stays empty.
struct DataBlock {
  Vec64 features; // row-major count x dim
  Vec64 targets;
  std::vector<int32_t> labels;

  int64_t count() const {
    return static_cast<int64_t>(targets.size() + labels.size());
  }
};

struct FederatedDataset {
  TaskKind kind = TaskKind::Regression;
  int dim = 0;
  std::vector<DataBlock> nodes;
  DataBlock test; // shared held-out pool, may be empty

  // Throws DataError/DimensionError when block shapes disagree with kind
  // and dim.
  void validate() const;
};

// Binary container, little-endian. Layout:
//   "FDSET" u8:version u8:kind u8:0 u32:dim u32:n_nodes
//   then n_nodes + 1 blocks (the extra one is the test pool), each
//   u32:count f64[count*dim]:features (f64[count]:targets | i32[count]:labels)
void save_dataset(const FederatedDataset& ds, const std::string& path);
FederatedDataset load_dataset(const std::string& path);

} // namespace lsgda
