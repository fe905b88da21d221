#include "lsgda/problem.hpp"

#include <cmath>

#include "lsgda/errors.hpp"

namespace lsgda {

void MinimaxProblem::stochastic_grad(int node, const Vec64& x, const Vec64& y,
                                     int batch_size, RngStream& rng, Vec64& gx,
                                     Vec64& gy) const {
  stochastic_grad_split(node, x, x, y, batch_size, rng, gx, gy);
}

void MinimaxProblem::project_dual(Vec64&) const {}

void MinimaxProblem::check_point(int node, const Vec64& x,
                                 const Vec64& y) const {
  if (node < 0 || node >= n_nodes()) {
    throw DimensionError("node index out of range");
  }
  if (x.size() != static_cast<size_t>(dim_x()) ||
      y.size() != static_cast<size_t>(dim_y())) {
    throw DimensionError("iterate sizes do not match the problem dimensions");
  }
}

EnvelopeEval MinimaxProblem::envelope_eval(const Vec64&) const {
  throw OracleError("this problem has no envelope oracle");
}

double MinimaxProblem::global_value(const Vec64& x, const Vec64& y) const {
  double s = 0.0;
  const int n = n_nodes();
  for (int i = 0; i < n; ++i) s += full_value(i, x, y);
  return s / static_cast<double>(n);
}

void MinimaxProblem::global_grad(const Vec64& x, const Vec64& y, Vec64& gx,
                                 Vec64& gy) const {
  const int n = n_nodes();
  std::vector<Vec64> gxs(n), gys(n);
  for (int i = 0; i < n; ++i) {
    gxs[i].assign(static_cast<size_t>(dim_x()), 0.0);
    gys[i].assign(static_cast<size_t>(dim_y()), 0.0);
    full_grad(i, x, y, gxs[i], gys[i]);
  }
  gx = average_vectors(gxs);
  gy = average_vectors(gys);
}

void project_ball(Vec64& v, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ConfigError("project_ball: radius must be positive");
  }
  double n = norm(v);
  // Re-scale until inside; rounding can leave the first pass an ulp outside.
  // A pass that changes nothing means we sit on a rounding fixed point, at
  // worst an ulp outside, and must stop or we would spin forever.
  while (n > radius) {
    bool changed = false;
    for (double& c : v) {
      const double s = c * radius / n;
      if (s != c) {
        c = s;
        changed = true;
      }
    }
    if (!changed) break;
    n = norm(v);
  }
}

}  // namespace lsgda
