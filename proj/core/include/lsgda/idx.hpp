#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lsgda/vec.hpp"

namespace lsgda {

struct IdxImages {
  int64_t count = 0;
  int rows = 0;
  int cols = 0;
  Vec64 pixels; // row-major count x (rows*cols), scaled to [0, 1] by /255
};

// IDX containers (the MNIST family): big-endian magic and dims, then raw
// payload. Only u8 image tensors (magic 0x00000803) and u8 label vectors
// (magic 0x00000801) are supported. Failures throw IdxError with the kind
// set to BadMagic or Truncated.
IdxImages load_idx_images(const std::string& path);
std::vector<int32_t> load_idx_labels(const std::string& path);

struct IdxPair {
  Vec64 features; // count x (rows*cols)
  std::vector<int32_t> labels;
  int rows = 0;
  int cols = 0;
};

// Loads both files and checks the counts agree (IdxError/CountMismatch
// otherwise).
IdxPair load_idx_pair(const std::string& images_path,
                      const std::string& labels_path);

} // namespace lsgda
