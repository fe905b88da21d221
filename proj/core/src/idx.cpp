#include "lsgda/idx.hpp"

#include <fstream>

#include "lsgda/errors.hpp"

namespace lsgda {

namespace {

uint32_t get_be_u32(std::istream& is, const std::string& path) {
  char b[4];
  if (!is.read(b, 4)) {
    throw IdxError(IdxError::Kind::Truncated, path + ": unexpected end of file");
  }
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v = (v << 8) | static_cast<uint8_t>(b[i]);
  }
  return v;
}

std::ifstream open_idx(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  return is;
}

} // namespace

IdxImages load_idx_images(const std::string& path) {
  std::ifstream is = open_idx(path);
  const uint32_t magic = get_be_u32(is, path);
  if (magic != 0x00000803u) {
    throw IdxError(IdxError::Kind::BadMagic,
                   path + ": not a u8 image tensor (magic " +
                       std::to_string(magic) + ")");
  }
  IdxImages out;
  out.count = static_cast<int64_t>(get_be_u32(is, path));
  out.rows = static_cast<int>(get_be_u32(is, path));
  out.cols = static_cast<int>(get_be_u32(is, path));
  const size_t total = static_cast<size_t>(out.count) *
                       static_cast<size_t>(out.rows) *
                       static_cast<size_t>(out.cols);
  std::vector<char> raw(total);
  if (total > 0 && !is.read(raw.data(), static_cast<std::streamsize>(total))) {
    throw IdxError(IdxError::Kind::Truncated,
                   path + ": pixel payload is shorter than the header claims");
  }
  out.pixels.resize(total);
  for (size_t k = 0; k < total; ++k) {
    out.pixels[k] = static_cast<uint8_t>(raw[k]) / 255.0;
  }
  return out;
}

std::vector<int32_t> load_idx_labels(const std::string& path) {
  std::ifstream is = open_idx(path);
  const uint32_t magic = get_be_u32(is, path);
  if (magic != 0x00000801u) {
    throw IdxError(IdxError::Kind::BadMagic,
                   path + ": not a u8 label vector (magic " +
                       std::to_string(magic) + ")");
  }
  const uint32_t count = get_be_u32(is, path);
  std::vector<char> raw(count);
  if (count > 0 && !is.read(raw.data(), static_cast<std::streamsize>(count))) {
    throw IdxError(IdxError::Kind::Truncated,
                   path + ": label payload is shorter than the header claims");
  }
  std::vector<int32_t> labels(count);
  for (uint32_t k = 0; k < count; ++k) {
    labels[k] = static_cast<uint8_t>(raw[k]);
  }
  return labels;
}

IdxPair load_idx_pair(const std::string& images_path,
                      const std::string& labels_path) {
  IdxImages imgs = load_idx_images(images_path);
  std::vector<int32_t> labels = load_idx_labels(labels_path);
  if (static_cast<size_t>(imgs.count) != labels.size()) {
    throw IdxError(IdxError::Kind::CountMismatch,
                   images_path + " has " + std::to_string(imgs.count) +
                       " images but " + labels_path + " has " +
                       std::to_string(labels.size()) + " labels");
  }
  IdxPair out;
  out.features = std::move(imgs.pixels);
  out.labels = std::move(labels);
  out.rows = imgs.rows;
  out.cols = imgs.cols;
  return out;
}

} // namespace lsgda
