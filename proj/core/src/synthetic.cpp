#include "lsgda/synthetic.hpp"

#include <cmath>
#include <cstddef>

#include "lsgda/errors.hpp"
#include "lsgda/rng.hpp"

namespace lsgda {

void SyntheticSpec::validate() const {
  if (n_nodes < 1) throw ConfigError("synthetic: n_nodes must be >= 1");
  if (dim < 1) throw ConfigError("synthetic: dim must be >= 1");
  if (kind == TaskKind::Classification && n_classes < 2) {
    throw ConfigError("synthetic: n_classes must be >= 2");
  }
  if (min_count < 1 || max_count < min_count) {
    throw ConfigError("synthetic: need 1 <= min_count <= max_count");
  }
  if (!(alpha >= 0.0)) {
    throw ConfigError("synthetic: alpha must be >= 0");
  }
  if (!(test_fraction >= 0.0) || !(test_fraction < 1.0)) {
    throw ConfigError("synthetic: test_fraction must be in [0, 1)");
  }
}

FederatedDataset generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const auto sd = static_cast<size_t>(spec.dim);
  const int rows =
      spec.kind == TaskKind::Regression ? 1 : spec.n_classes;

  // stddev of coordinate k (0-indexed) decays as (k+1)^-0.6, so later
  // coordinates carry less signal
  Vec64 coord_std(sd);
  for (size_t k = 0; k < sd; ++k) {
    coord_std[k] = std::pow(static_cast<double>(k + 1), -0.6);
  }

  FederatedDataset ds;
  ds.kind = spec.kind;
  ds.dim = spec.dim;
  ds.nodes.resize(static_cast<size_t>(spec.n_nodes));

  for (int i = 0; i < spec.n_nodes; ++i) {
    RngStream rng(derive_worker_seed(spec.seed, i));

    const double m_i = spec.alpha * rng.normal();
    Vec64 mu(sd);
    for (auto& v : mu) v = m_i + rng.normal();
    const auto span =
        static_cast<uint64_t>(spec.max_count - spec.min_count + 1);
    const auto count =
        static_cast<int64_t>(spec.min_count) +
        static_cast<int64_t>(rng.bounded(span));
    // One shared model distribution for all nodes; alpha moves only the
    // feature locations.
    Vec64 w(static_cast<size_t>(rows) * sd);
    for (auto& v : w) v = rng.normal();
    Vec64 b(static_cast<size_t>(rows));
    for (auto& v : b) v = rng.normal();

    DataBlock& blk = ds.nodes[static_cast<size_t>(i)];
    blk.features.resize(static_cast<size_t>(count) * sd);
    if (spec.kind == TaskKind::Regression) {
      blk.targets.resize(static_cast<size_t>(count));
    } else {
      blk.labels.resize(static_cast<size_t>(count));
    }
    for (int64_t j = 0; j < count; ++j) {
      double* row = blk.features.data() + static_cast<size_t>(j) * sd;
      for (size_t k = 0; k < sd; ++k) {
        row[k] = mu[k] + coord_std[k] * rng.normal();
      }
      if (spec.kind == TaskKind::Regression) {
        double y = b[0]; // targets are noiseless by design
        for (size_t k = 0; k < sd; ++k) y += w[k] * row[k];
        blk.targets[static_cast<size_t>(j)] = y;
      } else {
        int best = 0;
        double best_z = 0.0;
        for (int c = 0; c < rows; ++c) {
          double z = b[static_cast<size_t>(c)];
          for (size_t k = 0; k < sd; ++k) {
            z += w[static_cast<size_t>(c) * sd + k] * row[k];
          }
          if (c == 0 || z > best_z) {
            best_z = z;
            best = c;
          }
        }
        blk.labels[static_cast<size_t>(j)] = best;
      }
    }
  }

  // Trailing samples of each node form the shared test pool.
  if (spec.test_fraction > 0.0) {
    for (DataBlock& blk : ds.nodes) {
      const auto m = blk.count();
      const auto take = static_cast<int64_t>(
          std::floor(static_cast<double>(m) * spec.test_fraction));
      if (take == 0) continue;
      const auto keep = static_cast<size_t>(m - take);
      ds.test.features.insert(ds.test.features.end(),
                              blk.features.begin() +
                                  static_cast<std::ptrdiff_t>(keep * sd),
                              blk.features.end());
      blk.features.resize(keep * sd);
      if (spec.kind == TaskKind::Regression) {
        ds.test.targets.insert(ds.test.targets.end(),
                               blk.targets.begin() +
                                   static_cast<std::ptrdiff_t>(keep),
                               blk.targets.end());
        blk.targets.resize(keep);
      } else {
        ds.test.labels.insert(ds.test.labels.end(),
                              blk.labels.begin() +
                                  static_cast<std::ptrdiff_t>(keep),
                              blk.labels.end());
        blk.labels.resize(keep);
      }
    }
  }
  ds.validate();
  return ds;
}

} // namespace lsgda
