#pragma once

#include <cstdint>
#include <vector>

#include "lsgda/config.hpp"
#include "lsgda/dataset.hpp"
#include "lsgda/problem.hpp"
#include "lsgda/rng.hpp"
#include "lsgda/vec.hpp"

namespace lsgda {

// Adversarially robust classifier: a two-hidden-layer ReLU network whose
// input is shifted by a shared perturbation delta (the dual block, kept in
// a ball of the given radius). Per node, the objective is the mean softmax
// cross entropy over that node's samples at inputs a_j + delta.
//
// Parameters are one flat vector [W1 b1 W2 b2 W3 b3], weight matrices
// row-major with fan-in as the column index. All-zero parameters give the
// uniform predictive distribution, so the loss is exactly ln(n_classes)
// regardless of data or delta.
//
// ReLU has a kink at zero; gradients use the subderivative 0 there. Finite
// difference checks must stay away from the kink, which
// min_abs_preactivation measures.
class RobustMlp final : public MinimaxProblem, public RobustEvaluable {
 public:
  // Requires a classification dataset with labels in [0, n_classes) and at
  // least one sample on every node. Keeps its own copy of the data.
  RobustMlp(const FederatedDataset& data, int hidden1, int hidden2,
            int n_classes, double ball_radius);

  // Weight entries ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)) in layout order,
  // biases zero (no draws consumed for them).
  Vec64 init_weights(uint64_t seed) const;

  int n_nodes() const override { return static_cast<int>(nodes_.size()); }
  int dim_x() const override { return n_params_; }
  int dim_y() const override { return dim_in_; }

  double full_value(int node, const Vec64& x, const Vec64& y) const override;
  void full_grad(int node, const Vec64& x, const Vec64& y, Vec64& gx,
                 Vec64& gy) const override;
  // batch_size indices with replacement; the primal gradient is evaluated
  // with parameters x_primal and the dual (input perturbation) gradient
  // with parameters x_dual, both on the same batch. RNG consumption is
  // batch_size bounded draws regardless of aliasing.
  void stochastic_grad_split(int node, const Vec64& x_primal,
                             const Vec64& x_dual, const Vec64& y,
                             int batch_size, RngStream& rng, Vec64& gx,
                             Vec64& gy) const override;

  bool has_dual_constraint() const override { return true; }
  void project_dual(Vec64& y) const override;

  const ProblemConstants& constants() const override { return constants_; }

  // Adversarial evaluation over the held-out pool (test split when present,
  // otherwise all training data).
  int eval_dual_dim() const override { return dim_in_; }
  double eval_objective(const Vec64& x, const Vec64& delta) const override;
  void eval_dual_grad(const Vec64& x, const Vec64& delta,
                      Vec64& grad) const override;
  double eval_ball_radius() const override { return radius_; }

  // Fraction of the held-out pool classified correctly at inputs a + delta.
  double eval_accuracy(const Vec64& x, const Vec64& delta) const;

  // Smallest |pre-activation| over both hidden layers and every training
  // sample, at inputs a + delta. Near zero means a ReLU kink is in play.
  double min_abs_preactivation(const Vec64& x, const Vec64& delta) const;

  int n_classes() const { return n_classes_; }
  int n_params() const { return n_params_; }

 private:
  struct NodeData {
    Vec64 features; // row-major count x dim_in
    std::vector<int32_t> labels;
  };

  struct Layout {
    size_t w1, b1, w2, b2, w3, b3;
  };

  // One sample: forward at a+delta, cross entropy against the label, and
  // when requested the parameter gradient and/or the input gradient, both
  // accumulated (not overwritten).
  double sample_loss_grad(const Vec64& params, const double* row,
                          const Vec64& delta, int label, Vec64* gparams,
                          Vec64* ginput) const;

  int dim_in_ = 0;
  int h1_ = 0;
  int h2_ = 0;
  int n_classes_ = 0;
  int n_params_ = 0;
  Layout lay_{};
  double radius_ = 0.0;
  std::vector<NodeData> nodes_;
  Vec64 eval_features_;
  std::vector<int32_t> eval_labels_;
  ProblemConstants constants_;
};

} // namespace lsgda
