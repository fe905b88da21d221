#pragma once

#include <utility>
#include <vector>

#include "lsgda/problem.hpp"
#include "lsgda/trace.hpp"
#include "lsgda/vec.hpp"

namespace lsgda {

// Mean squared distance of the workers from the given averages, one value
// per block: ((1/n) sum_i |x_i - x_avg|^2, same for y). Zero exactly when
// every worker holds a bitwise copy of the average.
std::pair<double, double> compute_deviation(
    const std::vector<WorkerState>& workers, const Vec64& x_avg,
    const Vec64& y_avg);

// Adversarial objective estimate: projected gradient ascent on the held-out
// perturbation, starting from zero, inner_steps steps of size inner_lr, each
// followed by projection onto the evaluation ball. Returns the objective at
// the final perturbation.
double robust_loss(const RobustEvaluable& prob, const Vec64& x,
                   int inner_steps = 100, double inner_lr = 0.01);

// How hard the node objectives pull at the saddle point of the average
// problem: delta = (1/n) sum_i |g_i|^2 per block, evaluated at the oracle
// saddle. Uncentered on purpose: the averaged gradient vanishes there (up
// to the solve residual, reported as a diagnostic), so any leftover norm is
// heterogeneity.
struct HeterogeneityReport {
  double delta_x = 0.0;
  double delta_y = 0.0;
  double mean_grad_norm_x = 0.0;
  double mean_grad_norm_y = 0.0;
};

// Throws OracleError when the problem has no saddle oracle.
HeterogeneityReport heterogeneity_at_optimum(const MinimaxProblem& prob);

// Worst-case centered gradient spread over a set of probe points:
// max over probes of (1/n) sum_i |g_i(x, y) - gbar(x, y)|^2, per block.
struct Dissimilarity {
  double zeta_x_sq = 0.0;
  double zeta_y_sq = 0.0;
};

Dissimilarity gradient_dissimilarity(
    const MinimaxProblem& prob,
    const std::vector<std::pair<Vec64, Vec64>>& probes);

// Stationarity proxy for nonconvex envelopes: gradient descent on
// Phi(u) + smoothness * |u - x|^2 with step 1/(4 * smoothness), started at
// x. The reported quantity is |2 * smoothness * (x - u_final)|^2, which
// tends to the squared Moreau envelope gradient norm as the inner problem
// is solved exactly.
struct MoreauEstimate {
  Vec64 prox_point;
  double grad_norm_sq = 0.0;
};

// Requires the problem's envelope oracle; smoothness > 0, inner_iters >= 1.
MoreauEstimate moreau_grad_estimate(const MinimaxProblem& prob, const Vec64& x,
                                    double smoothness, int inner_iters);

} // namespace lsgda
