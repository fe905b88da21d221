#pragma once

#include <cstdint>
#include <vector>

#include "lsgda/config.hpp"
#include "lsgda/problem.hpp"
#include "lsgda/rng.hpp"
#include "lsgda/vec.hpp"

namespace lsgda {

// Nonconvex primal, dual that satisfies a PL inequality without strong
// concavity. Per node i, with a shared measurement map M (dim_m x dim_y)
// and node affine targets h_i(x) = P_i x + r_i:
//
//   F_i(x, y) = sum_k c_ik * bump(x_k - shift_ik) - (1/2)|M y - h_i(x)|^2
//
// The dual part is a concave quadratic whose Hessian M'M may be singular,
// so -F(x, .) is PL with modulus = smallest positive eigenvalue of M'M but
// not strongly concave when rank(M) < dim_y.
//
// The primal envelope max_y Fbar(x, y) is closed form. With Q the projector
// onto the orthogonal complement of range(M) and hbar = Pbar x + rbar:
//
//   Phi(x) = fbar(x) - (1/2)|Q hbar(x)|^2
//            - (1/2n) sum_i |h_i(x) - hbar(x)|^2
//
// Note both correction terms are concave quadratics in x. Instances meant
// to be optimized should keep them constant: identical P_i across nodes
// with columns inside range(M) (see random_bounded), leaving only r_i to
// carry heterogeneity.
class NcplToy final : public MinimaxProblem {
 public:
  struct Node {
    Vec64 c;     // dim_x well heights, should be > 0
    Vec64 shift; // dim_x well centers
    Vec64 p;     // dim_m x dim_x, row-major
    Vec64 r;     // dim_m
  };

  NcplToy(int dim_x, int dim_y, int dim_m, Vec64 m_flat,
          std::vector<Node> nodes, double noise_std);

  // Bounded-below instance: M = A B has the requested rank, every node
  // shares P = M G (so Q Pbar = 0 and the projected term is constant), and
  // r_i = r_shared + paired zero-mean offsets. Heterogeneity then shifts
  // values without tilting the envelope.
  static NcplToy random_bounded(int n_nodes, int dim_x, int dim_y, int dim_m,
                                int rank, double c_lo, double c_hi,
                                double shift_std, double r_spread,
                                double noise_std, uint64_t seed);

  int n_nodes() const override { return static_cast<int>(nodes_.size()); }
  int dim_x() const override { return dx_; }
  int dim_y() const override { return dy_; }
  int dim_m() const { return dm_; }

  double full_value(int node, const Vec64& x, const Vec64& y) const override;
  void full_grad(int node, const Vec64& x, const Vec64& y, Vec64& gx,
                 Vec64& gy) const override;
  void stochastic_grad_split(int node, const Vec64& x_primal,
                             const Vec64& x_dual, const Vec64& y,
                             int batch_size, RngStream& rng, Vec64& gx,
                             Vec64& gy) const override;

  bool has_envelope_oracle() const override { return true; }
  EnvelopeEval envelope_eval(const Vec64& x) const override;

  const ProblemConstants& constants() const override { return constants_; }

  // PL modulus of the dual problem (smallest positive eigenvalue of M'M).
  double pl_modulus() const { return mu_pl_; }
  const Node& node(int i) const { return nodes_.at(static_cast<size_t>(i)); }

 private:
  int dx_ = 0;
  int dy_ = 0;
  int dm_ = 0;
  Vec64 m_;     // dim_m x dim_y, row-major
  Vec64 q_;     // dim_m x dim_m projector onto range(M) complement
  Vec64 p_avg_; // dim_m x dim_x
  Vec64 r_avg_; // dim_m
  double mu_pl_ = 0.0;
  std::vector<Node> nodes_;
  double noise_std_ = 0.0;
  ProblemConstants constants_;
};

} // namespace lsgda
