#pragma once

#include <optional>

#include "lsgda/config.hpp"
#include "lsgda/rng.hpp"
#include "lsgda/vec.hpp"

namespace lsgda {

struct SaddlePoint {
  Vec64 x;
  Vec64 y;
  // Norm of the optimality-system residual left by the solver.
  double residual = 0.0;
};

struct EnvelopeEval {
  double value = 0.0;  // Phi(x) = max_y F(x, y)
  Vec64 grad;          // exact gradient of Phi at x
};

// A finite-sum minimax objective F(x, y) = (1/n) sum_i f_i(x, y), where node
// i owns f_i and its local data. Primal x is minimized, dual y is maximized;
// full_grad returns the gradient of f_i in both blocks (callers ascend by
// adding the y block).
class MinimaxProblem {
 public:
  virtual ~MinimaxProblem() = default;

  virtual int n_nodes() const = 0;
  virtual int dim_x() const = 0;
  virtual int dim_y() const = 0;

  virtual double full_value(int node, const Vec64& x, const Vec64& y) const = 0;
  virtual void full_grad(int node, const Vec64& x, const Vec64& y, Vec64& gx,
                         Vec64& gy) const = 0;

  // Draws ONE stochastic event (a minibatch of the node's data, or one noise
  // realization) from `rng` and evaluates both gradient blocks on it: the
  // primal block at (x_primal, y) and the dual block at (x_dual, y). The two
  // evaluation points share the event, which is what stale-anchor updates
  // require. Implementations must consume `rng` identically regardless of
  // whether the two points coincide.
  virtual void stochastic_grad_split(int node, const Vec64& x_primal,
                                     const Vec64& x_dual, const Vec64& y,
                                     int batch_size, RngStream& rng, Vec64& gx,
                                     Vec64& gy) const = 0;

  // Both blocks at one point; forwards to stochastic_grad_split with
  // x_primal and x_dual aliasing the same vector.
  void stochastic_grad(int node, const Vec64& x, const Vec64& y,
                       int batch_size, RngStream& rng, Vec64& gx,
                       Vec64& gy) const;

  // Dual-domain constraint; project_dual is a no-op unless overridden.
  virtual bool has_dual_constraint() const { return false; }
  virtual void project_dual(Vec64& y) const;

  // Closed-form saddle point, for families that can solve for one.
  virtual std::optional<SaddlePoint> saddle_oracle() const { return {}; }

  // Exact primal envelope Phi(x) = max_y F(x, y) and its gradient, for
  // families with a tractable inner maximization. envelope_eval throws
  // OracleError unless has_envelope_oracle().
  virtual bool has_envelope_oracle() const { return false; }
  virtual EnvelopeEval envelope_eval(const Vec64& x) const;

  virtual const ProblemConstants& constants() const = 0;

  // Mean of per-node values / gradients; gradients are combined with
  // average_vectors, so the result is bit-reproducible.
  double global_value(const Vec64& x, const Vec64& y) const;
  void global_grad(const Vec64& x, const Vec64& y, Vec64& gx, Vec64& gy) const;

 protected:
  // Entry-point guard for the evaluation operations: node must index a real
  // node and both blocks must have the declared dimensions.
  void check_point(int node, const Vec64& x, const Vec64& y) const;
};

// Pooled adversarial evaluation over held-out data, used by the robust-loss
// metric. Implemented by the data-driven robust families.
class RobustEvaluable {
 public:
  virtual ~RobustEvaluable() = default;

  virtual int eval_dual_dim() const = 0;
  // Objective at (x, delta) over the pooled evaluation split.
  virtual double eval_objective(const Vec64& x, const Vec64& delta) const = 0;
  // Gradient of the pooled objective in delta.
  virtual void eval_dual_grad(const Vec64& x, const Vec64& delta,
                              Vec64& gd) const = 0;
  // Ball the adversary is confined to during evaluation.
  virtual double eval_ball_radius() const = 0;
};

// Euclidean projection onto the closed ball of the given radius, in place.
// Returns v unchanged when already inside. The scaled result is re-checked
// and re-scaled if rounding left it outside, so the operation never increases
// the norm and is bitwise idempotent.
void project_ball(Vec64& v, double radius);

}  // namespace lsgda
