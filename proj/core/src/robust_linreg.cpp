#include "lsgda/robust_linreg.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>

#include "lsgda/errors.hpp"

namespace lsgda {

namespace {

double row_dot(const double* row, const Vec64& w) {
  double s = 0.0;
  for (size_t k = 0; k < w.size(); ++k) s += row[k] * w[k];
  return s;
}

} // namespace

RobustLinReg::RobustLinReg(const FederatedDataset& data, Options opts)
    : dim_(data.dim), opts_(opts) {
  if (data.kind != TaskKind::Regression) {
    throw ConfigError("RobustLinReg: dataset is not a regression task");
  }
  if (dim_ < 1) throw ConfigError("RobustLinReg: dim must be >= 1");
  if (data.nodes.empty()) throw DataError("RobustLinReg: dataset has no nodes");
  if (!(opts_.lambda_x >= 0.0)) {
    throw ConfigError("RobustLinReg: lambda_x must be >= 0");
  }
  if (opts_.mode == DualMode::Penalty && !(opts_.lambda_y > 0.0)) {
    throw ConfigError("RobustLinReg: Penalty mode needs lambda_y > 0");
  }
  if (opts_.mode == DualMode::Ball && !(opts_.ball_radius > 0.0)) {
    throw ConfigError("RobustLinReg: Ball mode needs ball_radius > 0");
  }

  const auto sd = static_cast<size_t>(dim_);
  nodes_.reserve(data.nodes.size());
  for (size_t i = 0; i < data.nodes.size(); ++i) {
    const DataBlock& blk = data.nodes[i];
    const auto m = static_cast<size_t>(blk.count());
    if (m == 0) {
      throw DataError("RobustLinReg: node " + std::to_string(i) +
                      " has no samples");
    }
    if (blk.features.size() != m * sd || blk.targets.size() != m) {
      throw DimensionError("RobustLinReg: node " + std::to_string(i) +
                           " block shape does not match dim");
    }
    nodes_.push_back({blk.features, blk.targets});
  }

  // Held-out pool: the test split when present, otherwise every training
  // sample. Metrics that maximize over the perturbation use this pool.
  if (data.test.count() > 0) {
    eval_features_ = data.test.features;
    eval_targets_ = data.test.targets;
  } else {
    for (const NodeData& nd : nodes_) {
      eval_features_.insert(eval_features_.end(), nd.features.begin(),
                            nd.features.end());
      eval_targets_.insert(eval_targets_.end(), nd.targets.begin(),
                           nd.targets.end());
    }
  }

  // Documented estimates, not certified constants. Curvature is taken at the
  // origin (the cross block grows with |w|, so no global bound exists):
  //   L  ~ max_i 2 lmax(Gram_i) + lambda_x + lambda_y
  //   mu = lambda_y in Penalty mode (dual strong concavity), else 0
  //   sigma^2 = empirical single-sample primal gradient variance at 0.
  double lmax = 0.0;
  double var = 0.0;
  for (const NodeData& nd : nodes_) {
    const auto m = nd.targets.size();
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dim_, dim_);
    for (size_t j = 0; j < m; ++j) {
      const double* row = nd.features.data() + j * sd;
      for (int r = 0; r < dim_; ++r)
        for (int c = 0; c < dim_; ++c) gram(r, c) += row[r] * row[c];
    }
    gram /= static_cast<double>(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    lmax = std::max(lmax, es.eigenvalues().maxCoeff());

    Vec64 mean_g(sd, 0.0);
    for (size_t j = 0; j < m; ++j) {
      const double* row = nd.features.data() + j * sd;
      for (size_t k = 0; k < sd; ++k) mean_g[k] += -2.0 * nd.targets[j] * row[k];
    }
    for (double& v : mean_g) v /= static_cast<double>(m);
    double node_var = 0.0;
    for (size_t j = 0; j < m; ++j) {
      const double* row = nd.features.data() + j * sd;
      for (size_t k = 0; k < sd; ++k) {
        const double d = -2.0 * nd.targets[j] * row[k] - mean_g[k];
        node_var += d * d;
      }
    }
    var += node_var / static_cast<double>(m);
  }
  var /= static_cast<double>(nodes_.size());

  const double pen = opts_.mode == DualMode::Penalty ? opts_.lambda_y : 0.0;
  constants_.smoothness = 2.0 * lmax + opts_.lambda_x + pen;
  constants_.strong_convexity = pen;
  constants_.noise_variance = var;
  if (opts_.mode == DualMode::Ball) {
    constants_.domain_diameter = 2.0 * opts_.ball_radius;
  }
}

int RobustLinReg::n_nodes() const { return static_cast<int>(nodes_.size()); }

int64_t RobustLinReg::node_sample_count(int node) const {
  return static_cast<int64_t>(
      nodes_.at(static_cast<size_t>(node)).targets.size());
}

double RobustLinReg::full_value(int node, const Vec64& x,
                                const Vec64& y) const {
  check_point(node, x, y);
  const NodeData& nd = nodes_[static_cast<size_t>(node)];
  const auto sd = static_cast<size_t>(dim_);
  const auto m = nd.targets.size();
  const double s = dot(x, y);
  double acc = 0.0;
  for (size_t j = 0; j < m; ++j) {
    const double r = row_dot(nd.features.data() + j * sd, x) - nd.targets[j] + s;
    acc += r * r;
  }
  double v = acc / static_cast<double>(m) +
             0.5 * opts_.lambda_x * squared_norm(x);
  if (opts_.mode == DualMode::Penalty) {
    v -= 0.5 * opts_.lambda_y * squared_norm(y);
  }
  return v;
}

void RobustLinReg::full_grad(int node, const Vec64& x, const Vec64& y,
                             Vec64& gx, Vec64& gy) const {
  check_point(node, x, y);
  const NodeData& nd = nodes_[static_cast<size_t>(node)];
  const auto sd = static_cast<size_t>(dim_);
  const auto m = nd.targets.size();
  const double s = dot(x, y);

  gx.assign(sd, 0.0);
  double sum_r = 0.0;
  for (size_t j = 0; j < m; ++j) {
    const double* row = nd.features.data() + j * sd;
    const double r = row_dot(row, x) - nd.targets[j] + s;
    sum_r += r;
    for (size_t k = 0; k < sd; ++k) gx[k] += r * row[k];
  }
  const double inv_m = 1.0 / static_cast<double>(m);
  for (size_t k = 0; k < sd; ++k) {
    gx[k] = 2.0 * inv_m * (gx[k] + sum_r * y[k]) + opts_.lambda_x * x[k];
  }

  gy.assign(sd, 0.0);
  const double mean_r2 = 2.0 * inv_m * sum_r;
  for (size_t k = 0; k < sd; ++k) gy[k] = mean_r2 * x[k];
  if (opts_.mode == DualMode::Penalty) {
    for (size_t k = 0; k < sd; ++k) gy[k] -= opts_.lambda_y * y[k];
  }
}

void RobustLinReg::stochastic_grad_split(int node, const Vec64& x_primal,
                                         const Vec64& x_dual, const Vec64& y,
                                         int batch_size, RngStream& rng,
                                         Vec64& gx, Vec64& gy) const {
  check_point(node, x_primal, y);
  check_point(node, x_dual, y);
  const NodeData& nd = nodes_[static_cast<size_t>(node)];
  const auto sd = static_cast<size_t>(dim_);
  const auto m = static_cast<uint64_t>(nd.targets.size());
  const bool aliased = &x_primal == &x_dual;

  const double s_primal = dot(x_primal, y);
  const double s_dual = aliased ? s_primal : dot(x_dual, y);

  gx.assign(sd, 0.0);
  double sum_rp = 0.0;
  double sum_rd = 0.0;
  for (int k = 0; k < batch_size; ++k) {
    const auto j = static_cast<size_t>(rng.bounded(m));
    const double* row = nd.features.data() + j * sd;
    const double clean_p = row_dot(row, x_primal) - nd.targets[j];
    const double rp = clean_p + s_primal;
    sum_rp += rp;
    for (size_t c = 0; c < sd; ++c) gx[c] += rp * row[c];
    sum_rd += aliased ? rp
                      : row_dot(row, x_dual) - nd.targets[j] + s_dual;
  }
  const double inv_b = 1.0 / static_cast<double>(batch_size);
  for (size_t c = 0; c < sd; ++c) {
    gx[c] = 2.0 * inv_b * (gx[c] + sum_rp * y[c]) + opts_.lambda_x * x_primal[c];
  }

  gy.assign(sd, 0.0);
  const double mean_rd2 = 2.0 * inv_b * sum_rd;
  for (size_t c = 0; c < sd; ++c) gy[c] = mean_rd2 * x_dual[c];
  if (opts_.mode == DualMode::Penalty) {
    for (size_t c = 0; c < sd; ++c) gy[c] -= opts_.lambda_y * y[c];
  }
}

bool RobustLinReg::has_dual_constraint() const {
  return opts_.mode == DualMode::Ball;
}

void RobustLinReg::project_dual(Vec64& y) const {
  if (opts_.mode == DualMode::Ball) project_ball(y, opts_.ball_radius);
}

void RobustLinReg::refresh_eval_cache(const Vec64& w) const {
  if (cache_valid_ && cache_w_ == w) return;
  const auto sd = static_cast<size_t>(dim_);
  const auto m = eval_targets_.size();
  double mr = 0.0;
  double mr2 = 0.0;
  for (size_t j = 0; j < m; ++j) {
    const double r = row_dot(eval_features_.data() + j * sd, w) -
                     eval_targets_[j];
    mr += r;
    mr2 += r * r;
  }
  cache_mean_r_ = mr / static_cast<double>(m);
  cache_mean_r2_ = mr2 / static_cast<double>(m);
  cache_w_ = w;
  cache_valid_ = true;
}

double RobustLinReg::eval_objective(const Vec64& x, const Vec64& delta) const {
  if (x.size() != static_cast<size_t>(dim_) ||
      delta.size() != static_cast<size_t>(dim_)) {
    throw DimensionError("RobustLinReg::eval_objective: bad sizes");
  }
  refresh_eval_cache(x);
  const double s = dot(x, delta);
  return cache_mean_r2_ + 2.0 * s * cache_mean_r_ + s * s +
         0.5 * opts_.lambda_x * squared_norm(x);
}

void RobustLinReg::eval_dual_grad(const Vec64& x, const Vec64& delta,
                                  Vec64& grad) const {
  if (x.size() != static_cast<size_t>(dim_) ||
      delta.size() != static_cast<size_t>(dim_)) {
    throw DimensionError("RobustLinReg::eval_dual_grad: bad sizes");
  }
  refresh_eval_cache(x);
  const double s = dot(x, delta);
  const double scale = 2.0 * (cache_mean_r_ + s);
  grad.assign(x.size(), 0.0);
  for (size_t k = 0; k < x.size(); ++k) grad[k] = scale * x[k];
}

double RobustLinReg::eval_ball_radius() const {
  return opts_.mode == DualMode::Ball ? opts_.ball_radius : 1.0;
}

} // namespace lsgda
