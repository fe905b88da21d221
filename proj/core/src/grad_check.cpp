#include "lsgda/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "lsgda/errors.hpp"

namespace lsgda {

GradCheckResult check_node_gradient(const MinimaxProblem& prob, int node,
                                    const Vec64& x, const Vec64& y,
                                    double step) {
  if (!(step > 0.0)) throw ConfigError("check_node_gradient: step must be > 0");
  GradCheckResult res;
  Vec64 gx, gy;
  prob.full_grad(node, x, y, gx, gy);

  Vec64 xp = x;
  for (size_t k = 0; k < x.size(); ++k) {
    xp[k] = x[k] + step;
    const double fp = prob.full_value(node, xp, y);
    xp[k] = x[k] - step;
    const double fm = prob.full_value(node, xp, y);
    xp[k] = x[k];
    const double fd = (fp - fm) / (2.0 * step);
    const double err = std::abs(fd - gx[k]) / std::max(1.0, std::abs(gx[k]));
    if (err > res.max_rel_err_x) {
      res.max_rel_err_x = err;
      res.worst_coord_x = static_cast<int>(k);
    }
  }
  Vec64 yp = y;
  for (size_t k = 0; k < y.size(); ++k) {
    yp[k] = y[k] + step;
    const double fp = prob.full_value(node, x, yp);
    yp[k] = y[k] - step;
    const double fm = prob.full_value(node, x, yp);
    yp[k] = y[k];
    const double fd = (fp - fm) / (2.0 * step);
    const double err = std::abs(fd - gy[k]) / std::max(1.0, std::abs(gy[k]));
    if (err > res.max_rel_err_y) {
      res.max_rel_err_y = err;
      res.worst_coord_y = static_cast<int>(k);
    }
  }
  return res;
}

GradCheckResult check_envelope_gradient(const MinimaxProblem& prob,
                                        const Vec64& x, double step) {
  if (!(step > 0.0)) {
    throw ConfigError("check_envelope_gradient: step must be > 0");
  }
  GradCheckResult res;
  const EnvelopeEval at = prob.envelope_eval(x);
  Vec64 xp = x;
  for (size_t k = 0; k < x.size(); ++k) {
    xp[k] = x[k] + step;
    const double fp = prob.envelope_eval(xp).value;
    xp[k] = x[k] - step;
    const double fm = prob.envelope_eval(xp).value;
    xp[k] = x[k];
    const double fd = (fp - fm) / (2.0 * step);
    const double err =
        std::abs(fd - at.grad[k]) / std::max(1.0, std::abs(at.grad[k]));
    if (err > res.max_rel_err_x) {
      res.max_rel_err_x = err;
      res.worst_coord_x = static_cast<int>(k);
    }
  }
  return res;
}

} // namespace lsgda
