#pragma once

#include <cstdint>
#include <vector>

#include "lsgda/config.hpp"
#include "lsgda/dataset.hpp"
#include "lsgda/problem.hpp"
#include "lsgda/vec.hpp"

namespace lsgda {

// Linear regression made robust against a shared feature perturbation. The
// primal block is the weight vector w, the dual block is the perturbation
// delta applied to every feature vector. Per node with samples (a_j, b_j):
//
//   f_i(w, delta) = mean_j (w'(a_j + delta) - b_j)^2 + (lambda_x/2)|w|^2
//                   - penalty(delta)
//
// where penalty is (lambda_y/2)|delta|^2 in Penalty mode, and absent in Ball
// mode (there delta is instead constrained to |delta| <= ball_radius and the
// solver projects after every dual step).
class RobustLinReg final : public MinimaxProblem, public RobustEvaluable {
 public:
  enum class DualMode { Penalty, Ball };

  struct Options {
    double lambda_x = 0.0;
    DualMode mode = DualMode::Penalty;
    double lambda_y = 1.0;    // Penalty mode only
    double ball_radius = 1.0; // Ball mode only
  };

  // Requires a regression dataset with at least one sample on every node.
  // Keeps its own copy of the data.
  RobustLinReg(const FederatedDataset& data, Options opts);

  int n_nodes() const override;
  int dim_x() const override { return dim_; }
  int dim_y() const override { return dim_; }

  double full_value(int node, const Vec64& x, const Vec64& y) const override;
  void full_grad(int node, const Vec64& x, const Vec64& y, Vec64& gx,
                 Vec64& gy) const override;
  // Samples batch_size indices with replacement, then evaluates the primal
  // gradient at x_primal and the dual gradient at x_dual on that same batch.
  // RNG consumption is batch_size bounded draws regardless of aliasing.
  void stochastic_grad_split(int node, const Vec64& x_primal,
                             const Vec64& x_dual, const Vec64& y,
                             int batch_size, RngStream& rng, Vec64& gx,
                             Vec64& gy) const override;

  bool has_dual_constraint() const override;
  void project_dual(Vec64& y) const override;

  const ProblemConstants& constants() const override { return constants_; }

  // Adversarial evaluation over the held-out pool (test split when present,
  // otherwise all training data). The perturbed objective at (w, delta)
  // collapses to scalar statistics of the clean residuals:
  //   value = mean(r^2) + 2 s mean(r) + s^2 + (lambda_x/2)|w|^2,  s = w'delta
  // so each inner ascent step is O(dim) once the residual moments for w are
  // cached. Not thread safe (the cache is shared mutable state).
  int eval_dual_dim() const override { return dim_; }
  double eval_objective(const Vec64& x, const Vec64& delta) const override;
  void eval_dual_grad(const Vec64& x, const Vec64& delta,
                      Vec64& grad) const override;
  double eval_ball_radius() const override;

  const Options& options() const { return opts_; }
  int64_t node_sample_count(int node) const;
  int64_t eval_sample_count() const {
    return static_cast<int64_t>(eval_targets_.size());
  }

 private:
  struct NodeData {
    Vec64 features; // row-major count x dim
    Vec64 targets;  // count
  };

  void refresh_eval_cache(const Vec64& w) const;

  int dim_ = 0;
  Options opts_;
  std::vector<NodeData> nodes_;
  Vec64 eval_features_; // pooled, row-major
  Vec64 eval_targets_;
  ProblemConstants constants_;

  mutable Vec64 cache_w_;
  mutable double cache_mean_r_ = 0.0;
  mutable double cache_mean_r2_ = 0.0;
  mutable bool cache_valid_ = false;
};

} // namespace lsgda
