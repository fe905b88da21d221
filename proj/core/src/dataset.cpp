#include "lsgda/dataset.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

#include "lsgda/errors.hpp"
#include "lsgda/version.hpp"

namespace lsgda {

namespace {

constexpr char kMagic[5] = {'F', 'D', 'S', 'E', 'T'};

void put_u8(std::ostream& os, uint8_t v) {
  os.put(static_cast<char>(v));
}

void put_u32(std::ostream& os, uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(b, 4);
}

void put_u64(std::ostream& os, uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(b, 8);
}

void put_f64(std::ostream& os, double v) {
  put_u64(os, std::bit_cast<uint64_t>(v));
}

uint8_t get_u8(std::istream& is) {
  const int c = is.get();
  if (c == std::char_traits<char>::eof()) {
    throw IoError("dataset file is truncated");
  }
  return static_cast<uint8_t>(c);
}

uint32_t get_u32(std::istream& is) {
  char b[4];
  if (!is.read(b, 4)) throw IoError("dataset file is truncated");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<uint32_t>(static_cast<uint8_t>(b[i])) << (8 * i);
  }
  return v;
}

uint64_t get_u64(std::istream& is) {
  char b[8];
  if (!is.read(b, 8)) throw IoError("dataset file is truncated");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<uint64_t>(static_cast<uint8_t>(b[i])) << (8 * i);
  }
  return v;
}

double get_f64(std::istream& is) {
  return std::bit_cast<double>(get_u64(is));
}

void put_block(std::ostream& os, const DataBlock& blk, TaskKind kind) {
  put_u32(os, static_cast<uint32_t>(blk.count()));
  for (double v : blk.features) put_f64(os, v);
  if (kind == TaskKind::Regression) {
    for (double v : blk.targets) put_f64(os, v);
  } else {
    for (int32_t v : blk.labels) put_u32(os, static_cast<uint32_t>(v));
  }
}

DataBlock get_block(std::istream& is, TaskKind kind, int dim) {
  DataBlock blk;
  const uint32_t count = get_u32(is);
  blk.features.resize(static_cast<size_t>(count) * static_cast<size_t>(dim));
  for (double& v : blk.features) v = get_f64(is);
  if (kind == TaskKind::Regression) {
    blk.targets.resize(count);
    for (double& v : blk.targets) v = get_f64(is);
  } else {
    blk.labels.resize(count);
    for (int32_t& v : blk.labels) v = static_cast<int32_t>(get_u32(is));
  }
  return blk;
}

void check_block(const DataBlock& blk, TaskKind kind, int dim,
                 const std::string& what) {
  const auto m = static_cast<size_t>(blk.count());
  if (blk.features.size() != m * static_cast<size_t>(dim)) {
    throw DimensionError("dataset: " + what +
                         " feature size does not match count * dim");
  }
  if (kind == TaskKind::Regression && !blk.labels.empty()) {
    throw DataError("dataset: " + what + " has labels in a regression task");
  }
  if (kind == TaskKind::Classification && !blk.targets.empty()) {
    throw DataError("dataset: " + what +
                    " has targets in a classification task");
  }
}

} // namespace

void FederatedDataset::validate() const {
  if (dim < 1) throw DataError("dataset: dim must be >= 1");
  if (kind != TaskKind::Regression && kind != TaskKind::Classification) {
    throw DataError("dataset: unknown task kind");
  }
  for (size_t i = 0; i < nodes.size(); ++i) {
    check_block(nodes[i], kind, dim, "node " + std::to_string(i));
  }
  check_block(test, kind, dim, "test pool");
}

void save_dataset(const FederatedDataset& ds, const std::string& path) {
  ds.validate();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os.write(kMagic, sizeof(kMagic));
  put_u8(os, kDatasetFormatVersion);
  put_u8(os, static_cast<uint8_t>(ds.kind));
  put_u8(os, 0);
  put_u32(os, static_cast<uint32_t>(ds.dim));
  put_u32(os, static_cast<uint32_t>(ds.nodes.size()));
  for (const DataBlock& blk : ds.nodes) put_block(os, blk, ds.kind);
  put_block(os, ds.test, ds.kind);
  if (!os) throw IoError("write failed for " + path);
}

FederatedDataset load_dataset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  char magic[5];
  if (!is.read(magic, sizeof(magic)) ||
      std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw IoError(path + " is not a dataset file (bad magic)");
  }
  const uint8_t version = get_u8(is);
  if (version != kDatasetFormatVersion) {
    throw IoError(path + ": unsupported dataset format version " +
                  std::to_string(version));
  }
  const uint8_t kind_raw = get_u8(is);
  if (kind_raw > 1) throw IoError(path + ": unknown task kind");
  get_u8(is); // reserved
  FederatedDataset ds;
  ds.kind = static_cast<TaskKind>(kind_raw);
  ds.dim = static_cast<int>(get_u32(is));
  const uint32_t n_nodes = get_u32(is);
  ds.nodes.reserve(n_nodes);
  for (uint32_t i = 0; i < n_nodes; ++i) {
    ds.nodes.push_back(get_block(is, ds.kind, ds.dim));
  }
  ds.test = get_block(is, ds.kind, ds.dim);
  ds.validate();
  return ds;
}

} // namespace lsgda
