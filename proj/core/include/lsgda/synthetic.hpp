#pragma once

#include <cstdint>

#include "lsgda/dataset.hpp"

namespace lsgda {

// Heterogeneous synthetic data with a single divergence knob: alpha spreads
// the per-node feature locations. The generating models are drawn from one
// shared distribution on every node, and regression targets carry no noise.
// alpha = 0 makes every node draw features from the same distribution (the
// samples still differ because the streams do).
struct SyntheticSpec {
  TaskKind kind = TaskKind::Regression;
  int n_nodes = 4;
  int dim = 10;
  int n_classes = 2; // classification only
  double alpha = 1.0;
  int min_count = 400; // per-node sample count, drawn uniformly
  int max_count = 500; // inclusive
  double test_fraction = 0.2;
  uint64_t seed = 1;

  void validate() const;
};

// Node i draws from its own stream (worker seed derived from spec.seed and
// i), in this frozen order:
//   m_i ~ alpha * N(0,1)                     feature location
//   mu_i[k] = m_i + N(0,1)                   per-coordinate feature means
//   count_i uniform in [min_count, max_count]
//   W_i entries ~ N(0,1), row-major          (1 x dim regression,
//                                             n_classes x dim otherwise)
//   b_i entries ~ N(0,1)                     (scalar / n_classes)
//   samples j: x[k] = mu_i[k] + (k+1)^-0.6 * N(0,1), then for regression
//              y = W_i.x + b_i exactly; classification labels are
//              argmax(W_i x + b_i), no draw.
// The trailing floor(count_i * test_fraction) samples of every node move to
// the shared test pool.
FederatedDataset generate_synthetic(const SyntheticSpec& spec);

} // namespace lsgda
