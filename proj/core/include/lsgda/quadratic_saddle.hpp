#pragma once

#include <cstdint>
#include <vector>

#include "lsgda/problem.hpp"

namespace lsgda {

// Per-node quadratic saddle objective
//   f_i(x, y) = 1/2 x'A_i x + x'B_i y - 1/2 y'C_i y + p_i'x + q_i'y
// with A_i, C_i symmetric positive definite. The global saddle point solves
// the linear optimality system [Abar Bbar; Bbar' -Cbar](x, y) = (-pbar, -qbar).
// Stochastic gradients add i.i.d. N(0, noise_std^2) noise per coordinate.
class QuadraticSaddle final : public MinimaxProblem {
 public:
  struct Node {
    Vec64 a;  // dx*dx, row-major
    Vec64 b;  // dx*dy, row-major
    Vec64 c;  // dy*dy, row-major
    Vec64 p;  // dx
    Vec64 q;  // dy
  };

  QuadraticSaddle(int dim_x, int dim_y, std::vector<Node> nodes,
                  double noise_std);

  // Seeded random instance. Eigenvalues of every A_i, C_i are drawn from
  // [mu, l_max]; coupling scales B_i; spread scales zero-mean per-node offsets
  // added to shared p, q (spread = 0 gives bitwise-identical nodes).
  static QuadraticSaddle random(int n_nodes, int dim_x, int dim_y, double mu,
                                double l_max, double coupling, double spread,
                                double noise_std, uint64_t seed);

  int n_nodes() const override { return static_cast<int>(nodes_.size()); }
  int dim_x() const override { return dx_; }
  int dim_y() const override { return dy_; }

  double full_value(int node, const Vec64& x, const Vec64& y) const override;
  void full_grad(int node, const Vec64& x, const Vec64& y, Vec64& gx,
                 Vec64& gy) const override;
  void stochastic_grad_split(int node, const Vec64& x_primal,
                             const Vec64& x_dual, const Vec64& y,
                             int batch_size, RngStream& rng, Vec64& gx,
                             Vec64& gy) const override;

  // Dense solve of the averaged optimality system. Throws
  // SingularSystemError when the system has no reliable solution; otherwise
  // the returned residual satisfies residual <= 1e-8 * (1 + |rhs|).
  std::optional<SaddlePoint> saddle_oracle() const override;

  // Phi(x) = 1/2 x'Abar x + pbar'x + 1/2 (Bbar'x + qbar)' Cbar^{-1} (Bbar'x + qbar).
  bool has_envelope_oracle() const override { return true; }
  EnvelopeEval envelope_eval(const Vec64& x) const override;

  const ProblemConstants& constants() const override { return constants_; }

  const Node& node(int i) const { return nodes_.at(static_cast<size_t>(i)); }
  double noise_std() const { return noise_std_; }

 private:
  int dx_;
  int dy_;
  std::vector<Node> nodes_;
  Node avg_;  // averaged blocks, precomputed once
  double noise_std_;
  ProblemConstants constants_;
};

}  // namespace lsgda
