#pragma once

#include <cstdint>
#include <vector>

#include "lsgda/config.hpp"
#include "lsgda/problem.hpp"
#include "lsgda/rng.hpp"
#include "lsgda/vec.hpp"

namespace lsgda {

// Nonconvex primal, strongly concave dual. Per node i:
//
//   f_i(x, y) = sum_k c_ik * bump(x_k - shift_ik) + x'B_i y - (mu_y/2)|y|^2
//
// with bump(u) = u^2/(1+u^2), a bounded nonconvex well whose derivative
// 2u/(1+u^2)^2 is 2-Lipschitz. The dual problem is an exact quadratic, so
// the best response y*(x) = Bbar'x / mu_y is closed form and the primal
// envelope
//
//   max_y Fbar(x, y) = fbar(x) + |Bbar'x|^2 / (2 mu_y)
//
// gives an analytic gradient to test stationarity against.
class NcscToy final : public MinimaxProblem {
 public:
  struct Node {
    Vec64 c;     // dim_x well heights, should be > 0
    Vec64 shift; // dim_x well centers
    Vec64 b;     // dim_x x dim_y coupling, row-major
  };

  NcscToy(int dim_x, int dim_y, double mu_y, std::vector<Node> nodes,
          double noise_std);

  // Draws c_ik ~ U[c_lo, c_hi], shift_ik ~ N(0, shift_std^2) and
  // B entries ~ N(0, b_std^2), node by node from one stream.
  static NcscToy random(int n_nodes, int dim_x, int dim_y, double mu_y,
                        double c_lo, double c_hi, double shift_std,
                        double b_std, double noise_std, uint64_t seed);

  int n_nodes() const override { return static_cast<int>(nodes_.size()); }
  int dim_x() const override { return dx_; }
  int dim_y() const override { return dy_; }

  double full_value(int node, const Vec64& x, const Vec64& y) const override;
  void full_grad(int node, const Vec64& x, const Vec64& y, Vec64& gx,
                 Vec64& gy) const override;
  // Exact per-node gradients plus additive N(0, noise_std^2) noise, primal
  // coordinates drawn before dual ones.
  void stochastic_grad_split(int node, const Vec64& x_primal,
                             const Vec64& x_dual, const Vec64& y,
                             int batch_size, RngStream& rng, Vec64& gx,
                             Vec64& gy) const override;

  bool has_envelope_oracle() const override { return true; }
  EnvelopeEval envelope_eval(const Vec64& x) const override;

  const ProblemConstants& constants() const override { return constants_; }

  double mu_y() const { return mu_y_; }
  const Node& node(int i) const { return nodes_.at(static_cast<size_t>(i)); }

 private:
  int dx_ = 0;
  int dy_ = 0;
  double mu_y_ = 0.0;
  std::vector<Node> nodes_;
  Vec64 b_avg_; // averaged coupling, row-major dim_x x dim_y
  double noise_std_ = 0.0;
  ProblemConstants constants_;
};

} // namespace lsgda
