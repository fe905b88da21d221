#include "lsgda/metrics.hpp"

#include <cmath>

#include "lsgda/errors.hpp"

namespace lsgda {

std::pair<double, double> compute_deviation(
    const std::vector<WorkerState>& workers, const Vec64& x_avg,
    const Vec64& y_avg) {
  if (workers.empty()) throw ConfigError("compute_deviation: no workers");
  double dx = 0.0;
  double dy = 0.0;
  for (const WorkerState& w : workers) {
    if (w.x.size() != x_avg.size() || w.y.size() != y_avg.size()) {
      throw DimensionError("compute_deviation: worker size mismatch");
    }
    for (size_t k = 0; k < x_avg.size(); ++k) {
      const double d = w.x[k] - x_avg[k];
      dx += d * d;
    }
    for (size_t k = 0; k < y_avg.size(); ++k) {
      const double d = w.y[k] - y_avg[k];
      dy += d * d;
    }
  }
  const auto n = static_cast<double>(workers.size());
  return {dx / n, dy / n};
}

double robust_loss(const RobustEvaluable& prob, const Vec64& x,
                   int inner_steps, double inner_lr) {
  if (inner_steps < 0) throw ConfigError("robust_loss: inner_steps >= 0");
  if (!(inner_lr > 0.0)) throw ConfigError("robust_loss: inner_lr > 0");
  const double radius = prob.eval_ball_radius();
  Vec64 delta(static_cast<size_t>(prob.eval_dual_dim()), 0.0);
  Vec64 grad;
  for (int s = 0; s < inner_steps; ++s) {
    prob.eval_dual_grad(x, delta, grad);
    axpy(inner_lr, grad, delta);
    project_ball(delta, radius);
  }
  return prob.eval_objective(x, delta);
}

HeterogeneityReport heterogeneity_at_optimum(const MinimaxProblem& prob) {
  const auto saddle = prob.saddle_oracle();
  if (!saddle.has_value()) {
    throw OracleError("heterogeneity_at_optimum: problem has no saddle oracle");
  }
  const int n = prob.n_nodes();
  std::vector<Vec64> gxs(static_cast<size_t>(n)), gys(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    prob.full_grad(i, saddle->x, saddle->y, gxs[static_cast<size_t>(i)],
                   gys[static_cast<size_t>(i)]);
  }
  const Vec64 gx_bar = average_vectors(gxs);
  const Vec64 gy_bar = average_vectors(gys);

  HeterogeneityReport rep;
  for (int i = 0; i < n; ++i) {
    rep.delta_x += squared_norm(gxs[static_cast<size_t>(i)]);
    rep.delta_y += squared_norm(gys[static_cast<size_t>(i)]);
  }
  rep.delta_x /= static_cast<double>(n);
  rep.delta_y /= static_cast<double>(n);
  rep.mean_grad_norm_x = norm(gx_bar);
  rep.mean_grad_norm_y = norm(gy_bar);
  return rep;
}

Dissimilarity gradient_dissimilarity(
    const MinimaxProblem& prob,
    const std::vector<std::pair<Vec64, Vec64>>& probes) {
  if (probes.empty()) {
    throw ConfigError("gradient_dissimilarity: need at least one probe");
  }
  const int n = prob.n_nodes();
  Dissimilarity out;
  std::vector<Vec64> gxs(static_cast<size_t>(n)), gys(static_cast<size_t>(n));
  for (const auto& [px, py] : probes) {
    for (int i = 0; i < n; ++i) {
      prob.full_grad(i, px, py, gxs[static_cast<size_t>(i)],
                     gys[static_cast<size_t>(i)]);
    }
    const Vec64 gx_bar = average_vectors(gxs);
    const Vec64 gy_bar = average_vectors(gys);
    double zx = 0.0;
    double zy = 0.0;
    for (int i = 0; i < n; ++i) {
      for (size_t k = 0; k < gx_bar.size(); ++k) {
        const double d = gxs[static_cast<size_t>(i)][k] - gx_bar[k];
        zx += d * d;
      }
      for (size_t k = 0; k < gy_bar.size(); ++k) {
        const double d = gys[static_cast<size_t>(i)][k] - gy_bar[k];
        zy += d * d;
      }
    }
    out.zeta_x_sq = std::max(out.zeta_x_sq, zx / static_cast<double>(n));
    out.zeta_y_sq = std::max(out.zeta_y_sq, zy / static_cast<double>(n));
  }
  return out;
}

MoreauEstimate moreau_grad_estimate(const MinimaxProblem& prob, const Vec64& x,
                                    double smoothness, int inner_iters) {
  if (!(smoothness > 0.0)) {
    throw ConfigError("moreau_grad_estimate: smoothness must be > 0");
  }
  if (inner_iters < 1) {
    throw ConfigError("moreau_grad_estimate: inner_iters must be >= 1");
  }
  // Phi + L|.-x|^2 is L-strongly convex and (envelope smoothness + 2L)
  // smooth whenever Phi is L-weakly convex; 1/(4L) is a safe step for the
  // families here.
  const double step = 1.0 / (4.0 * smoothness);
  MoreauEstimate est;
  est.prox_point = x;
  Vec64& u = est.prox_point;
  for (int it = 0; it < inner_iters; ++it) {
    const EnvelopeEval ev = prob.envelope_eval(u);
    for (size_t k = 0; k < u.size(); ++k) {
      u[k] -= step * (ev.grad[k] + 2.0 * smoothness * (u[k] - x[k]));
    }
  }
  double g = 0.0;
  for (size_t k = 0; k < u.size(); ++k) {
    const double d = 2.0 * smoothness * (x[k] - u[k]);
    g += d * d;
  }
  est.grad_norm_sq = g;
  return est;
}

} // namespace lsgda
