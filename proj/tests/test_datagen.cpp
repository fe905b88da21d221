#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "lsgda/dataset.hpp"
#include "lsgda/errors.hpp"
#include "lsgda/idx.hpp"
#include "lsgda/partition.hpp"
#include "lsgda/synthetic.hpp"

using namespace lsgda;
namespace fs = std::filesystem;

namespace {

fs::path tmp_file(const std::string& name) {
  return fs::temp_directory_path() / ("lsgda_test_" + name);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

void write_bytes(const fs::path& p, const std::vector<uint8_t>& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  REQUIRE(out.good());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

void push_be32(std::vector<uint8_t>& v, uint32_t x) {
  v.push_back(static_cast<uint8_t>(x >> 24));
  v.push_back(static_cast<uint8_t>(x >> 16));
  v.push_back(static_cast<uint8_t>(x >> 8));
  v.push_back(static_cast<uint8_t>(x));
}

std::vector<uint8_t> idx_images_bytes(uint32_t count, uint32_t rows,
                                      uint32_t cols,
                                      const std::vector<uint8_t>& pixels) {
  std::vector<uint8_t> v;
  push_be32(v, 0x00000803u);
  push_be32(v, count);
  push_be32(v, rows);
  push_be32(v, cols);
  v.insert(v.end(), pixels.begin(), pixels.end());
  return v;
}

std::vector<uint8_t> idx_labels_bytes(uint32_t count,
                                      const std::vector<uint8_t>& labels) {
  std::vector<uint8_t> v;
  push_be32(v, 0x00000801u);
  push_be32(v, count);
  v.insert(v.end(), labels.begin(), labels.end());
  return v;
}

} // namespace

TEST_CASE("synthetic generation respects counts, shapes and kinds") {
  SyntheticSpec spec;
  spec.kind = TaskKind::Regression;
  spec.n_nodes = 5;
  spec.dim = 4;
  spec.min_count = 10;
  spec.max_count = 14;
  spec.test_fraction = 0.2;
  spec.seed = 81;
  const FederatedDataset ds = generate_synthetic(spec);
  CHECK_NOTHROW(ds.validate());
  CHECK(ds.kind == TaskKind::Regression);
  CHECK(ds.dim == 4);
  REQUIRE(ds.nodes.size() == 5);
  int64_t total = ds.test.count();
  for (const DataBlock& b : ds.nodes) {
    CHECK(b.labels.empty());
    CHECK(b.count() >= 10 - 2); // up to floor(14 * 0.2) moved to the pool
    CHECK(b.count() <= 14);
    CHECK(b.features.size() ==
          static_cast<size_t>(b.count()) * 4);
    total += b.count();
  }
  CHECK(total >= 5 * 10);
  CHECK(total <= 5 * 14);
  CHECK(ds.test.count() >= 5 * 2); // every node sheds at least floor(10*0.2)

  SyntheticSpec cls = spec;
  cls.kind = TaskKind::Classification;
  cls.n_classes = 3;
  const FederatedDataset cd = generate_synthetic(cls);
  CHECK_NOTHROW(cd.validate());
  for (const DataBlock& b : cd.nodes) {
    CHECK(b.targets.empty());
    for (int32_t l : b.labels) {
      CHECK(l >= 0);
      CHECK(l < 3);
    }
  }
}

TEST_CASE("synthetic generation is reproducible and seed-sensitive") {
  SyntheticSpec spec;
  spec.n_nodes = 3;
  spec.dim = 5;
  spec.min_count = 8;
  spec.max_count = 12;
  spec.seed = 82;
  const FederatedDataset a = generate_synthetic(spec);
  const FederatedDataset b = generate_synthetic(spec);
  REQUIRE(a.nodes.size() == b.nodes.size());
  for (size_t i = 0; i < a.nodes.size(); ++i) {
    CHECK(a.nodes[i].features == b.nodes[i].features);
    CHECK(a.nodes[i].targets == b.nodes[i].targets);
  }
  CHECK(a.test.features == b.test.features);

  spec.seed = 83;
  const FederatedDataset c = generate_synthetic(spec);
  CHECK(a.nodes[0].features != c.nodes[0].features);
}

TEST_CASE("the feature-location knob widens the spread across nodes") {
  SyntheticSpec spec;
  spec.n_nodes = 40;
  spec.dim = 6;
  spec.min_count = 20;
  spec.max_count = 20;
  spec.test_fraction = 0.0;
  spec.seed = 84;

  auto node_mean_spread = [](const FederatedDataset& ds) {
    std::vector<double> means;
    for (const DataBlock& b : ds.nodes) {
      double m = 0.0;
      for (double v : b.features) m += v;
      means.push_back(m / static_cast<double>(b.features.size()));
    }
    double mu = 0.0;
    for (double m : means) mu += m;
    mu /= static_cast<double>(means.size());
    double var = 0.0;
    for (double m : means) var += (m - mu) * (m - mu);
    return var / static_cast<double>(means.size());
  };

  spec.alpha = 0.0;
  const double tight = node_mean_spread(generate_synthetic(spec));
  spec.alpha = 10.0;
  const double wide = node_mean_spread(generate_synthetic(spec));
  CHECK(wide > 20.0 * tight);
}

TEST_CASE("regression targets sit exactly on each node's generating line") {
  // dim 1 lets us recover (w, b) from two samples and confirm the rest of
  // the node's targets carry no noise at all
  SyntheticSpec spec;
  spec.kind = TaskKind::Regression;
  spec.n_nodes = 3;
  spec.dim = 1;
  spec.min_count = 12;
  spec.max_count = 12;
  spec.test_fraction = 0.0;
  spec.seed = 85;
  const FederatedDataset ds = generate_synthetic(spec);
  for (const DataBlock& blk : ds.nodes) {
    REQUIRE(blk.count() >= 3);
    const double x1 = blk.features[0], y1 = blk.targets[0];
    const double x2 = blk.features[1], y2 = blk.targets[1];
    REQUIRE(std::abs(x2 - x1) > 1e-6);
    const double w = (y2 - y1) / (x2 - x1);
    const double b = y1 - w * x1;
    for (int64_t j = 2; j < blk.count(); ++j) {
      const double pred = w * blk.features[static_cast<size_t>(j)] + b;
      const double y = blk.targets[static_cast<size_t>(j)];
      CHECK(std::abs(y - pred) <= 1e-9 * std::max(1.0, std::abs(y)));
    }
  }
}

TEST_CASE("dataset files round-trip exactly and reruns are byte identical") {
  SyntheticSpec spec;
  spec.kind = TaskKind::Classification;
  spec.n_nodes = 3;
  spec.dim = 4;
  spec.n_classes = 4;
  spec.min_count = 9;
  spec.max_count = 15;
  spec.seed = 85;
  const FederatedDataset ds = generate_synthetic(spec);

  const fs::path p1 = tmp_file("roundtrip_a.fds");
  const fs::path p2 = tmp_file("roundtrip_b.fds");
  save_dataset(ds, p1.string());
  save_dataset(generate_synthetic(spec), p2.string());
  CHECK(slurp(p1) == slurp(p2));

  const FederatedDataset back = load_dataset(p1.string());
  CHECK(back.kind == ds.kind);
  CHECK(back.dim == ds.dim);
  REQUIRE(back.nodes.size() == ds.nodes.size());
  for (size_t i = 0; i < ds.nodes.size(); ++i) {
    CHECK(back.nodes[i].features == ds.nodes[i].features);
    CHECK(back.nodes[i].labels == ds.nodes[i].labels);
  }
  CHECK(back.test.features == ds.test.features);
  CHECK(back.test.labels == ds.test.labels);

  fs::remove(p1);
  fs::remove(p2);
}

TEST_CASE("dataset io failures throw") {
  CHECK_THROWS_AS(load_dataset((tmp_file("missing_dir") / "nope.fds").string()),
                  IoError);
  SyntheticSpec spec;
  spec.n_nodes = 1;
  spec.min_count = 4;
  spec.max_count = 4;
  spec.seed = 86;
  const FederatedDataset ds = generate_synthetic(spec);
  CHECK_THROWS_AS(
      save_dataset(ds, (tmp_file("missing_dir") / "nope.fds").string()),
      IoError);

  // corrupt magic
  const fs::path bad = tmp_file("bad_magic.fds");
  write_bytes(bad, {'X', 'D', 'S', 'E', 'T', 1, 0, 0});
  CHECK_THROWS_AS(load_dataset(bad.string()), IoError);
  fs::remove(bad);
}

TEST_CASE("label partitioning carries features with their labels") {
  // 3 labels x 8 samples, 1 feature that encodes its label
  const int n = 24;
  Vec64 features(static_cast<size_t>(n));
  std::vector<int32_t> labels(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    labels[static_cast<size_t>(j)] = j % 3;
    features[static_cast<size_t>(j)] = static_cast<double>(j % 3);
  }
  PartitionSpec spec;
  spec.n_nodes = 3;
  spec.shards_per_node = 2;
  spec.seed = 91;
  const FederatedDataset ds = partition_by_label(features, labels, 1, spec);
  CHECK_NOTHROW(ds.validate());
  REQUIRE(ds.nodes.size() == 3);

  std::vector<int> seen(3, 0);
  for (const DataBlock& b : ds.nodes) {
    // 6 shards of exactly 4 samples, 2 per node
    CHECK(b.count() == 8);
    std::set<int32_t> distinct;
    for (size_t j = 0; j < b.labels.size(); ++j) {
      distinct.insert(b.labels[j]);
      seen[static_cast<size_t>(b.labels[j])]++;
      CHECK(b.features[j] == static_cast<double>(b.labels[j]));
    }
    CHECK(distinct.size() <= 2);
  }
  for (int c : seen) CHECK(c == 8); // nothing lost, nothing duplicated

  // deterministic given the seed
  const FederatedDataset again = partition_by_label(features, labels, 1, spec);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(ds.nodes[i].labels == again.nodes[i].labels);
    CHECK(ds.nodes[i].features == again.nodes[i].features);
  }
}

TEST_CASE("label partitioning rejects more shards than samples") {
  Vec64 features{0.0, 1.0, 2.0, 3.0, 4.0};
  std::vector<int32_t> labels{0, 1, 0, 1, 0};
  PartitionSpec spec;
  spec.n_nodes = 3;
  spec.shards_per_node = 2; // 6 shards, only 5 samples
  CHECK_THROWS_AS(partition_by_label(features, labels, 1, spec), DataError);
}

TEST_CASE("idx images load with pixel scaling") {
  const fs::path img = tmp_file("pix.idx");
  write_bytes(img, idx_images_bytes(2, 2, 2, {0, 255, 128, 64, 1, 2, 3, 4}));
  const IdxImages loaded = load_idx_images(img.string());
  CHECK(loaded.count == 2);
  CHECK(loaded.rows == 2);
  CHECK(loaded.cols == 2);
  REQUIRE(loaded.pixels.size() == 8);
  CHECK(loaded.pixels[0] == 0.0);
  CHECK(loaded.pixels[1] == 1.0);
  CHECK(loaded.pixels[2] == 128.0 / 255.0);
  CHECK(loaded.pixels[3] == 64.0 / 255.0);
  fs::remove(img);
}

TEST_CASE("idx parse failures carry their cause") {
  const fs::path img = tmp_file("badmagic.idx");
  write_bytes(img, idx_labels_bytes(1, {3})); // label magic fed to the image loader
  try {
    load_idx_images(img.string());
    FAIL("expected IdxError");
  } catch (const IdxError& e) {
    CHECK(e.kind == IdxError::Kind::BadMagic);
  }
  fs::remove(img);

  const fs::path trunc = tmp_file("trunc.idx");
  write_bytes(trunc, idx_images_bytes(10, 2, 2, {0, 1, 2, 3})); // 36 pixels missing
  try {
    load_idx_images(trunc.string());
    FAIL("expected IdxError");
  } catch (const IdxError& e) {
    CHECK(e.kind == IdxError::Kind::Truncated);
  }
  fs::remove(trunc);

  const fs::path i2 = tmp_file("pair_img.idx");
  const fs::path l2 = tmp_file("pair_lab.idx");
  write_bytes(i2, idx_images_bytes(2, 1, 2, {10, 20, 30, 40}));
  write_bytes(l2, idx_labels_bytes(3, {0, 1, 0}));
  try {
    load_idx_pair(i2.string(), l2.string());
    FAIL("expected IdxError");
  } catch (const IdxError& e) {
    CHECK(e.kind == IdxError::Kind::CountMismatch);
  }
  fs::remove(i2);
  fs::remove(l2);
}

TEST_CASE("idx pair combines images and labels") {
  const fs::path i2 = tmp_file("pair2_img.idx");
  const fs::path l2 = tmp_file("pair2_lab.idx");
  write_bytes(i2, idx_images_bytes(3, 1, 2, {10, 20, 30, 40, 50, 60}));
  write_bytes(l2, idx_labels_bytes(3, {2, 0, 1}));
  const IdxPair pair = load_idx_pair(i2.string(), l2.string());
  CHECK(pair.labels == std::vector<int32_t>{2, 0, 1});
  CHECK(pair.features.size() == 6);
  CHECK(pair.features[0] == 10.0 / 255.0);
  CHECK(pair.rows == 1);
  CHECK(pair.cols == 2);
  fs::remove(i2);
  fs::remove(l2);
}

TEST_CASE("spec validation rejects bad knobs") {
  SyntheticSpec spec;
  spec.n_nodes = 0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = SyntheticSpec{};
  spec.min_count = 10;
  spec.max_count = 5;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = SyntheticSpec{};
  spec.test_fraction = 1.5;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = SyntheticSpec{};
  spec.kind = TaskKind::Classification;
  spec.n_classes = 1;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}
