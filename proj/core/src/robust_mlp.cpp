#include "lsgda/robust_mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lsgda/errors.hpp"

namespace lsgda {

namespace {

void check_param_size(const Vec64& x, int n, const char* where) {
  if (x.size() != static_cast<size_t>(n)) {
    throw DimensionError(std::string(where) + ": parameter vector has size " +
                         std::to_string(x.size()) + ", expected " +
                         std::to_string(n));
  }
}

} // namespace

RobustMlp::RobustMlp(const FederatedDataset& data, int hidden1, int hidden2,
                     int n_classes, double ball_radius)
    : dim_in_(data.dim), h1_(hidden1), h2_(hidden2), n_classes_(n_classes),
      radius_(ball_radius) {
  if (data.kind != TaskKind::Classification) {
    throw ConfigError("RobustMlp: dataset is not a classification task");
  }
  if (dim_in_ < 1 || h1_ < 1 || h2_ < 1 || n_classes_ < 2) {
    throw ConfigError("RobustMlp: need dim >= 1, hidden >= 1, classes >= 2");
  }
  if (!(radius_ > 0.0)) throw ConfigError("RobustMlp: ball_radius must be > 0");
  if (data.nodes.empty()) throw DataError("RobustMlp: dataset has no nodes");

  lay_.w1 = 0;
  lay_.b1 = lay_.w1 + static_cast<size_t>(h1_) * dim_in_;
  lay_.w2 = lay_.b1 + static_cast<size_t>(h1_);
  lay_.b2 = lay_.w2 + static_cast<size_t>(h2_) * h1_;
  lay_.w3 = lay_.b2 + static_cast<size_t>(h2_);
  lay_.b3 = lay_.w3 + static_cast<size_t>(n_classes_) * h2_;
  n_params_ = static_cast<int>(lay_.b3 + static_cast<size_t>(n_classes_));

  const auto sd = static_cast<size_t>(dim_in_);
  auto take = [&](const DataBlock& blk, size_t node_idx, bool allow_empty) {
    const auto m = static_cast<size_t>(blk.count());
    if (m == 0 && !allow_empty) {
      throw DataError("RobustMlp: node " + std::to_string(node_idx) +
                      " has no samples");
    }
    if (blk.features.size() != m * sd || blk.labels.size() != m) {
      throw DimensionError("RobustMlp: block shape does not match dim");
    }
    for (int32_t l : blk.labels) {
      if (l < 0 || l >= n_classes_) {
        throw DataError("RobustMlp: label " + std::to_string(l) +
                        " outside [0, " + std::to_string(n_classes_) + ")");
      }
    }
    return NodeData{blk.features, blk.labels};
  };

  nodes_.reserve(data.nodes.size());
  for (size_t i = 0; i < data.nodes.size(); ++i) {
    nodes_.push_back(take(data.nodes[i], i, false));
  }
  NodeData ev = take(data.test, 0, true);
  if (!ev.labels.empty()) {
    eval_features_ = std::move(ev.features);
    eval_labels_ = std::move(ev.labels);
  } else {
    for (const NodeData& nd : nodes_) {
      eval_features_.insert(eval_features_.end(), nd.features.begin(),
                            nd.features.end());
      eval_labels_.insert(eval_labels_.end(), nd.labels.begin(),
                          nd.labels.end());
    }
  }

  // No certified curvature exists for this family; the placeholders below
  // keep the struct valid but step-size presets should not be derived from
  // them.
  constants_.smoothness = 1.0;
  constants_.strong_convexity = 0.0;
  constants_.noise_variance = 0.0;
  constants_.domain_diameter = 2.0 * radius_;
}

Vec64 RobustMlp::init_weights(uint64_t seed) const {
  RngStream rng(derive_worker_seed(seed, 0));
  Vec64 x(static_cast<size_t>(n_params_), 0.0);
  auto fill = [&](size_t off, size_t count, int fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (size_t k = 0; k < count; ++k) x[off + k] = rng.uniform(-bound, bound);
  };
  fill(lay_.w1, static_cast<size_t>(h1_) * dim_in_, dim_in_);
  fill(lay_.w2, static_cast<size_t>(h2_) * h1_, h1_);
  fill(lay_.w3, static_cast<size_t>(n_classes_) * h2_, h2_);
  return x;
}

double RobustMlp::sample_loss_grad(const Vec64& params, const double* row,
                                   const Vec64& delta, int label,
                                   Vec64* gparams, Vec64* ginput) const {
  const auto sd = static_cast<size_t>(dim_in_);
  const auto s1 = static_cast<size_t>(h1_);
  const auto s2 = static_cast<size_t>(h2_);
  const auto sc = static_cast<size_t>(n_classes_);
  const double* w1 = params.data() + lay_.w1;
  const double* b1 = params.data() + lay_.b1;
  const double* w2 = params.data() + lay_.w2;
  const double* b2 = params.data() + lay_.b2;
  const double* w3 = params.data() + lay_.w3;
  const double* b3 = params.data() + lay_.b3;

  Vec64 in(sd);
  for (size_t k = 0; k < sd; ++k) in[k] = row[k] + delta[k];

  Vec64 z1(s1), a1(s1);
  for (size_t j = 0; j < s1; ++j) {
    double s = b1[j];
    const double* wr = w1 + j * sd;
    for (size_t k = 0; k < sd; ++k) s += wr[k] * in[k];
    z1[j] = s;
    a1[j] = s > 0.0 ? s : 0.0;
  }
  Vec64 z2(s2), a2(s2);
  for (size_t j = 0; j < s2; ++j) {
    double s = b2[j];
    const double* wr = w2 + j * s1;
    for (size_t k = 0; k < s1; ++k) s += wr[k] * a1[k];
    z2[j] = s;
    a2[j] = s > 0.0 ? s : 0.0;
  }
  Vec64 z3(sc);
  for (size_t j = 0; j < sc; ++j) {
    double s = b3[j];
    const double* wr = w3 + j * s2;
    for (size_t k = 0; k < s2; ++k) s += wr[k] * a2[k];
    z3[j] = s;
  }

  double zmax = z3[0];
  for (size_t j = 1; j < sc; ++j) zmax = std::max(zmax, z3[j]);
  double sum = 0.0;
  for (size_t j = 0; j < sc; ++j) sum += std::exp(z3[j] - zmax);
  const double lse = zmax + std::log(sum);
  const double loss = lse - z3[static_cast<size_t>(label)];
  if (gparams == nullptr && ginput == nullptr) return loss;

  Vec64 dz3(sc);
  for (size_t j = 0; j < sc; ++j) dz3[j] = std::exp(z3[j] - lse);
  dz3[static_cast<size_t>(label)] -= 1.0;

  Vec64 dz2(s2, 0.0);
  for (size_t j = 0; j < s2; ++j) {
    if (z2[j] <= 0.0) continue; // subderivative 0 at the kink
    double s = 0.0;
    for (size_t k = 0; k < sc; ++k) s += w3[k * s2 + j] * dz3[k];
    dz2[j] = s;
  }
  Vec64 dz1(s1, 0.0);
  for (size_t j = 0; j < s1; ++j) {
    if (z1[j] <= 0.0) continue;
    double s = 0.0;
    for (size_t k = 0; k < s2; ++k) s += w2[k * s1 + j] * dz2[k];
    dz1[j] = s;
  }

  if (gparams != nullptr) {
    Vec64& g = *gparams;
    for (size_t j = 0; j < sc; ++j) {
      double* gr = g.data() + lay_.w3 + j * s2;
      for (size_t k = 0; k < s2; ++k) gr[k] += dz3[j] * a2[k];
      g[lay_.b3 + j] += dz3[j];
    }
    for (size_t j = 0; j < s2; ++j) {
      double* gr = g.data() + lay_.w2 + j * s1;
      for (size_t k = 0; k < s1; ++k) gr[k] += dz2[j] * a1[k];
      g[lay_.b2 + j] += dz2[j];
    }
    for (size_t j = 0; j < s1; ++j) {
      double* gr = g.data() + lay_.w1 + j * sd;
      for (size_t k = 0; k < sd; ++k) gr[k] += dz1[j] * in[k];
      g[lay_.b1 + j] += dz1[j];
    }
  }
  if (ginput != nullptr) {
    Vec64& g = *ginput;
    for (size_t k = 0; k < sd; ++k) {
      double s = 0.0;
      for (size_t j = 0; j < s1; ++j) s += w1[j * sd + k] * dz1[j];
      g[k] += s;
    }
  }
  return loss;
}

double RobustMlp::full_value(int node, const Vec64& x, const Vec64& y) const {
  check_point(node, x, y);
  const NodeData& nd = nodes_[static_cast<size_t>(node)];
  const auto sd = static_cast<size_t>(dim_in_);
  // Running mean, not sum-then-divide: when every sample has the same loss
  // (uniform prediction at zero weights) the mean must equal it bitwise.
  double acc = 0.0;
  for (size_t j = 0; j < nd.labels.size(); ++j) {
    const double loss = sample_loss_grad(x, nd.features.data() + j * sd, y,
                                         nd.labels[j], nullptr, nullptr);
    acc += (loss - acc) / static_cast<double>(j + 1);
  }
  return acc;
}

void RobustMlp::full_grad(int node, const Vec64& x, const Vec64& y, Vec64& gx,
                          Vec64& gy) const {
  check_point(node, x, y);
  const NodeData& nd = nodes_[static_cast<size_t>(node)];
  const auto sd = static_cast<size_t>(dim_in_);
  gx.assign(static_cast<size_t>(n_params_), 0.0);
  gy.assign(sd, 0.0);
  for (size_t j = 0; j < nd.labels.size(); ++j) {
    sample_loss_grad(x, nd.features.data() + j * sd, y, nd.labels[j], &gx,
                     &gy);
  }
  const double inv = 1.0 / static_cast<double>(nd.labels.size());
  for (double& v : gx) v *= inv;
  for (double& v : gy) v *= inv;
}

void RobustMlp::stochastic_grad_split(int node, const Vec64& x_primal,
                                      const Vec64& x_dual, const Vec64& y,
                                      int batch_size, RngStream& rng,
                                      Vec64& gx, Vec64& gy) const {
  check_point(node, x_primal, y);
  check_point(node, x_dual, y);
  const NodeData& nd = nodes_[static_cast<size_t>(node)];
  const auto sd = static_cast<size_t>(dim_in_);
  const auto m = static_cast<uint64_t>(nd.labels.size());

  std::vector<size_t> idx(static_cast<size_t>(batch_size));
  for (auto& j : idx) j = static_cast<size_t>(rng.bounded(m));

  gx.assign(static_cast<size_t>(n_params_), 0.0);
  gy.assign(sd, 0.0);
  if (&x_primal == &x_dual) {
    for (size_t j : idx) {
      sample_loss_grad(x_primal, nd.features.data() + j * sd, y, nd.labels[j],
                       &gx, &gy);
    }
  } else {
    for (size_t j : idx) {
      sample_loss_grad(x_primal, nd.features.data() + j * sd, y, nd.labels[j],
                       &gx, nullptr);
    }
    for (size_t j : idx) {
      sample_loss_grad(x_dual, nd.features.data() + j * sd, y, nd.labels[j],
                       nullptr, &gy);
    }
  }
  const double inv = 1.0 / static_cast<double>(batch_size);
  for (double& v : gx) v *= inv;
  for (double& v : gy) v *= inv;
}

void RobustMlp::project_dual(Vec64& y) const { project_ball(y, radius_); }

double RobustMlp::eval_objective(const Vec64& x, const Vec64& delta) const {
  check_param_size(x, n_params_, "RobustMlp::eval_objective");
  const auto sd = static_cast<size_t>(dim_in_);
  double acc = 0.0;
  for (size_t j = 0; j < eval_labels_.size(); ++j) {
    const double loss = sample_loss_grad(x, eval_features_.data() + j * sd,
                                         delta, eval_labels_[j], nullptr,
                                         nullptr);
    acc += (loss - acc) / static_cast<double>(j + 1);
  }
  return acc;
}

void RobustMlp::eval_dual_grad(const Vec64& x, const Vec64& delta,
                               Vec64& grad) const {
  check_param_size(x, n_params_, "RobustMlp::eval_dual_grad");
  const auto sd = static_cast<size_t>(dim_in_);
  grad.assign(sd, 0.0);
  for (size_t j = 0; j < eval_labels_.size(); ++j) {
    sample_loss_grad(x, eval_features_.data() + j * sd, delta, eval_labels_[j],
                     nullptr, &grad);
  }
  const double inv = 1.0 / static_cast<double>(eval_labels_.size());
  for (double& v : grad) v *= inv;
}

double RobustMlp::eval_accuracy(const Vec64& x, const Vec64& delta) const {
  check_param_size(x, n_params_, "RobustMlp::eval_accuracy");
  const auto sd = static_cast<size_t>(dim_in_);
  const auto s1 = static_cast<size_t>(h1_);
  const auto s2 = static_cast<size_t>(h2_);
  const auto sc = static_cast<size_t>(n_classes_);
  const double* w1 = x.data() + lay_.w1;
  const double* b1 = x.data() + lay_.b1;
  const double* w2 = x.data() + lay_.w2;
  const double* b2 = x.data() + lay_.b2;
  const double* w3 = x.data() + lay_.w3;
  const double* b3 = x.data() + lay_.b3;

  int64_t hits = 0;
  Vec64 in(sd), a1(s1), a2(s2);
  for (size_t j = 0; j < eval_labels_.size(); ++j) {
    const double* row = eval_features_.data() + j * sd;
    for (size_t k = 0; k < sd; ++k) in[k] = row[k] + delta[k];
    for (size_t u = 0; u < s1; ++u) {
      double s = b1[u];
      for (size_t k = 0; k < sd; ++k) s += w1[u * sd + k] * in[k];
      a1[u] = s > 0.0 ? s : 0.0;
    }
    for (size_t u = 0; u < s2; ++u) {
      double s = b2[u];
      for (size_t k = 0; k < s1; ++k) s += w2[u * s1 + k] * a1[k];
      a2[u] = s > 0.0 ? s : 0.0;
    }
    int best = 0;
    double best_z = -std::numeric_limits<double>::infinity();
    for (size_t u = 0; u < sc; ++u) {
      double s = b3[u];
      for (size_t k = 0; k < s2; ++k) s += w3[u * s2 + k] * a2[k];
      if (s > best_z) {
        best_z = s;
        best = static_cast<int>(u);
      }
    }
    if (best == eval_labels_[j]) ++hits;
  }
  return static_cast<double>(hits) /
         static_cast<double>(eval_labels_.size());
}

double RobustMlp::min_abs_preactivation(const Vec64& x,
                                        const Vec64& delta) const {
  check_param_size(x, n_params_, "RobustMlp::min_abs_preactivation");
  const auto sd = static_cast<size_t>(dim_in_);
  const auto s1 = static_cast<size_t>(h1_);
  const auto s2 = static_cast<size_t>(h2_);
  const double* w1 = x.data() + lay_.w1;
  const double* b1 = x.data() + lay_.b1;
  const double* w2 = x.data() + lay_.w2;
  const double* b2 = x.data() + lay_.b2;

  double best = std::numeric_limits<double>::infinity();
  Vec64 in(sd), a1(s1);
  for (const NodeData& nd : nodes_) {
    for (size_t j = 0; j < nd.labels.size(); ++j) {
      const double* row = nd.features.data() + j * sd;
      for (size_t k = 0; k < sd; ++k) in[k] = row[k] + delta[k];
      for (size_t u = 0; u < s1; ++u) {
        double s = b1[u];
        for (size_t k = 0; k < sd; ++k) s += w1[u * sd + k] * in[k];
        best = std::min(best, std::abs(s));
        a1[u] = s > 0.0 ? s : 0.0;
      }
      for (size_t u = 0; u < s2; ++u) {
        double s = b2[u];
        for (size_t k = 0; k < s1; ++k) s += w2[u * s1 + k] * a1[k];
        best = std::min(best, std::abs(s));
      }
    }
  }
  return best;
}

} // namespace lsgda
