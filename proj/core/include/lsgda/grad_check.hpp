#pragma once

#include "lsgda/problem.hpp"
#include "lsgda/vec.hpp"

namespace lsgda {

struct GradCheckResult {
  double max_rel_err_x = 0.0;
  double max_rel_err_y = 0.0;
  int worst_coord_x = -1;
  int worst_coord_y = -1;
};

// Central differences of one node's objective against its analytic
// gradient. Per coordinate the error is |fd - an| / max(1, |an|), so tiny
// gradients are judged absolutely and large ones relatively.
GradCheckResult check_node_gradient(const MinimaxProblem& prob, int node,
                                    const Vec64& x, const Vec64& y,
                                    double step);

// Same check for the primal envelope oracle (value vs grad consistency).
// The y fields of the result stay at their defaults.
GradCheckResult check_envelope_gradient(const MinimaxProblem& prob,
                                        const Vec64& x, double step);

} // namespace lsgda
