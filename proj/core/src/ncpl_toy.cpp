#include "lsgda/ncpl_toy.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "lsgda/errors.hpp"

namespace lsgda {

namespace {

double bump(double u) { return u * u / (1.0 + u * u); }

double bump_deriv(double u) {
  const double d = 1.0 + u * u;
  return 2.0 * u / (d * d);
}

// resid = M y - P x - r, in the caller's buffer
void residual(const Vec64& m, const Vec64& p, const Vec64& r, int dm, int dy,
              int dx, const Vec64& x, const Vec64& y, Vec64& out) {
  out.assign(static_cast<size_t>(dm), 0.0);
  for (int row = 0; row < dm; ++row) {
    double s = -r[static_cast<size_t>(row)];
    const double* mrow = m.data() + static_cast<size_t>(row) * dy;
    for (int k = 0; k < dy; ++k) s += mrow[k] * y[static_cast<size_t>(k)];
    const double* prow = p.data() + static_cast<size_t>(row) * dx;
    for (int k = 0; k < dx; ++k) s -= prow[k] * x[static_cast<size_t>(k)];
    out[static_cast<size_t>(row)] = s;
  }
}

} // namespace

NcplToy::NcplToy(int dim_x, int dim_y, int dim_m, Vec64 m_flat,
                 std::vector<Node> nodes, double noise_std)
    : dx_(dim_x), dy_(dim_y), dm_(dim_m), m_(std::move(m_flat)),
      nodes_(std::move(nodes)), noise_std_(noise_std) {
  if (dx_ < 1 || dy_ < 1 || dm_ < 1) {
    throw ConfigError("NcplToy: dimensions must be >= 1");
  }
  if (nodes_.empty()) throw ConfigError("NcplToy: no nodes");
  if (!(noise_std_ >= 0.0) || !std::isfinite(noise_std_)) {
    throw ConfigError("NcplToy: noise_std must be >= 0");
  }
  const auto sx = static_cast<size_t>(dx_);
  const auto sy = static_cast<size_t>(dy_);
  const auto sm = static_cast<size_t>(dm_);
  if (m_.size() != sm * sy) {
    throw DimensionError("NcplToy: M size does not match dim_m x dim_y");
  }
  for (const Node& nd : nodes_) {
    if (nd.c.size() != sx || nd.shift.size() != sx || nd.p.size() != sm * sx ||
        nd.r.size() != sm) {
      throw DimensionError("NcplToy: node block sizes do not match dims");
    }
  }

  Eigen::MatrixXd me(dm_, dy_);
  for (int r = 0; r < dm_; ++r)
    for (int k = 0; k < dy_; ++k)
      me(r, k) = m_[static_cast<size_t>(r) * sy + static_cast<size_t>(k)];

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(me.transpose() * me);
  const double emax = es.eigenvalues().maxCoeff();
  const double tol = 1e-10 * std::max(1.0, emax);
  double mu = 0.0;
  for (int k = 0; k < dy_; ++k) {
    const double e = es.eigenvalues()(k);
    if (e > tol && (mu == 0.0 || e < mu)) mu = e;
  }
  if (mu == 0.0) throw ConfigError("NcplToy: M must be nonzero");
  mu_pl_ = mu;

  // Q = I - U_r U_r' from the singular vectors of M above tolerance.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(me, Eigen::ComputeThinU);
  const double stol = std::sqrt(tol);
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(dm_, dm_);
  for (int k = 0; k < svd.singularValues().size(); ++k) {
    if (svd.singularValues()(k) > stol) {
      const Eigen::VectorXd u = svd.matrixU().col(k);
      q -= u * u.transpose();
    }
  }
  q_.assign(sm * sm, 0.0);
  for (int r = 0; r < dm_; ++r)
    for (int k = 0; k < dm_; ++k)
      q_[static_cast<size_t>(r) * sm + static_cast<size_t>(k)] = q(r, k);

  p_avg_.assign(sm * sx, 0.0);
  r_avg_.assign(sm, 0.0);
  for (const Node& nd : nodes_) {
    for (size_t k = 0; k < nd.p.size(); ++k) p_avg_[k] += nd.p[k];
    for (size_t k = 0; k < nd.r.size(); ++k) r_avg_[k] += nd.r[k];
  }
  const auto n = static_cast<double>(nodes_.size());
  for (double& v : p_avg_) v /= n;
  for (double& v : r_avg_) v /= n;

  // Quadratic part per node has Hessian J'J with J = [-P_i M], so its norm
  // is smax([P_i M])^2. The bump part adds at most 2 max_k c_ik.
  double l = 0.0;
  for (const Node& nd : nodes_) {
    double cmax = 0.0;
    for (double c : nd.c) cmax = std::max(cmax, std::abs(c));
    Eigen::MatrixXd j(dm_, dx_ + dy_);
    for (int r = 0; r < dm_; ++r) {
      for (int k = 0; k < dx_; ++k)
        j(r, k) = nd.p[static_cast<size_t>(r) * sx + static_cast<size_t>(k)];
      for (int k = 0; k < dy_; ++k) j(r, dx_ + k) = me(r, k);
    }
    const double smax =
        Eigen::JacobiSVD<Eigen::MatrixXd>(j).singularValues().maxCoeff();
    l = std::max(l, 2.0 * cmax + smax * smax);
  }
  constants_.smoothness = l;
  constants_.strong_convexity = mu_pl_;
  constants_.noise_variance =
      noise_std_ * noise_std_ * static_cast<double>(std::max(dx_, dy_));
}

NcplToy NcplToy::random_bounded(int n_nodes, int dim_x, int dim_y, int dim_m,
                                int rank, double c_lo, double c_hi,
                                double shift_std, double r_spread,
                                double noise_std, uint64_t seed) {
  if (n_nodes < 1) throw ConfigError("NcplToy::random_bounded: n_nodes >= 1");
  if (rank < 1 || rank > std::min(dim_y, dim_m)) {
    throw ConfigError("NcplToy::random_bounded: rank out of range");
  }
  if (!(0.0 < c_lo && c_lo <= c_hi)) {
    throw ConfigError("NcplToy::random_bounded: need 0 < c_lo <= c_hi");
  }
  RngStream rng(derive_worker_seed(seed, 0));

  Eigen::MatrixXd a(dim_m, rank);
  for (int r = 0; r < dim_m; ++r)
    for (int k = 0; k < rank; ++k) a(r, k) = rng.normal();
  Eigen::MatrixXd b(rank, dim_y);
  for (int r = 0; r < rank; ++r)
    for (int k = 0; k < dim_y; ++k) b(r, k) = rng.normal();
  const Eigen::MatrixXd m = a * b;

  // Columns of P live in range(M), so the projected envelope term cannot
  // grow with x. Scaled down to keep the smoothness constant moderate.
  Eigen::MatrixXd g(dim_y, dim_x);
  for (int r = 0; r < dim_y; ++r)
    for (int k = 0; k < dim_x; ++k)
      g(r, k) = rng.normal() / static_cast<double>(dim_y);
  const Eigen::MatrixXd p = m * g;

  Vec64 r_shared(static_cast<size_t>(dim_m));
  for (auto& v : r_shared) v = rng.normal();

  const auto sx = static_cast<size_t>(dim_x);
  const auto sm = static_cast<size_t>(dim_m);
  Vec64 p_flat(sm * sx);
  for (int r = 0; r < dim_m; ++r)
    for (int k = 0; k < dim_x; ++k)
      p_flat[static_cast<size_t>(r) * sx + static_cast<size_t>(k)] = p(r, k);

  std::vector<Node> nodes(static_cast<size_t>(n_nodes));
  for (Node& nd : nodes) {
    nd.c.resize(sx);
    nd.shift.resize(sx);
    nd.p = p_flat;
    nd.r = r_shared;
    for (auto& v : nd.c) v = rng.uniform(c_lo, c_hi);
    for (auto& v : nd.shift) v = shift_std * rng.normal();
  }
  // Paired offsets keep rbar exactly at r_shared; an odd trailing node
  // stays unshifted.
  for (int i = 0; i + 1 < n_nodes; i += 2) {
    for (size_t k = 0; k < sm; ++k) {
      const double d = r_spread * rng.normal();
      nodes[static_cast<size_t>(i)].r[k] += d;
      nodes[static_cast<size_t>(i) + 1].r[k] -= d;
    }
  }

  const auto sy = static_cast<size_t>(dim_y);
  Vec64 m_flat(sm * sy);
  for (int r = 0; r < dim_m; ++r)
    for (int k = 0; k < dim_y; ++k)
      m_flat[static_cast<size_t>(r) * sy + static_cast<size_t>(k)] = m(r, k);
  return NcplToy(dim_x, dim_y, dim_m, std::move(m_flat), std::move(nodes),
                 noise_std);
}

double NcplToy::full_value(int node, const Vec64& x, const Vec64& y) const {
  check_point(node, x, y);
  const Node& nd = nodes_[static_cast<size_t>(node)];
  double v = 0.0;
  for (size_t k = 0; k < x.size(); ++k) v += nd.c[k] * bump(x[k] - nd.shift[k]);
  Vec64 res;
  residual(m_, nd.p, nd.r, dm_, dy_, dx_, x, y, res);
  return v - 0.5 * squared_norm(res);
}

void NcplToy::full_grad(int node, const Vec64& x, const Vec64& y, Vec64& gx,
                        Vec64& gy) const {
  check_point(node, x, y);
  const Node& nd = nodes_[static_cast<size_t>(node)];
  const auto sx = static_cast<size_t>(dx_);
  const auto sy = static_cast<size_t>(dy_);
  Vec64 res;
  residual(m_, nd.p, nd.r, dm_, dy_, dx_, x, y, res);

  gx.assign(sx, 0.0);
  for (size_t k = 0; k < sx; ++k) {
    double s = nd.c[k] * bump_deriv(x[k] - nd.shift[k]);
    for (int row = 0; row < dm_; ++row) {
      s += nd.p[static_cast<size_t>(row) * sx + k] *
           res[static_cast<size_t>(row)];
    }
    gx[k] = s;
  }
  gy.assign(sy, 0.0);
  for (size_t k = 0; k < sy; ++k) {
    double s = 0.0;
    for (int row = 0; row < dm_; ++row) {
      s -= m_[static_cast<size_t>(row) * sy + k] * res[static_cast<size_t>(row)];
    }
    gy[k] = s;
  }
}

void NcplToy::stochastic_grad_split(int node, const Vec64& x_primal,
                                    const Vec64& x_dual, const Vec64& y,
                                    int /*batch_size*/, RngStream& rng,
                                    Vec64& gx, Vec64& gy) const {
  Vec64 tmp_y(static_cast<size_t>(dy_));
  full_grad(node, x_primal, y, gx, tmp_y);
  if (&x_dual == &x_primal) {
    gy = tmp_y;
  } else {
    Vec64 tmp_x(static_cast<size_t>(dx_));
    full_grad(node, x_dual, y, tmp_x, gy);
  }
  for (double& g : gx) g += noise_std_ * rng.normal();
  for (double& g : gy) g += noise_std_ * rng.normal();
}

EnvelopeEval NcplToy::envelope_eval(const Vec64& x) const {
  if (x.size() != static_cast<size_t>(dx_)) {
    throw DimensionError("NcplToy::envelope_eval: bad x size");
  }
  const auto sx = static_cast<size_t>(dx_);
  const auto sm = static_cast<size_t>(dm_);
  const double n = static_cast<double>(nodes_.size());

  EnvelopeEval out;
  double fbar = 0.0;
  Vec64 gbar(sx, 0.0);
  for (const Node& nd : nodes_) {
    for (size_t k = 0; k < sx; ++k) {
      fbar += nd.c[k] * bump(x[k] - nd.shift[k]);
      gbar[k] += nd.c[k] * bump_deriv(x[k] - nd.shift[k]);
    }
  }
  fbar /= n;
  for (double& v : gbar) v /= n;

  Vec64 hbar(sm, 0.0);
  for (size_t row = 0; row < sm; ++row) {
    double s = r_avg_[row];
    const double* prow = p_avg_.data() + row * sx;
    for (size_t k = 0; k < sx; ++k) s += prow[k] * x[k];
    hbar[row] = s;
  }
  Vec64 qh(sm, 0.0);
  for (size_t row = 0; row < sm; ++row) {
    double s = 0.0;
    const double* qrow = q_.data() + row * sm;
    for (size_t k = 0; k < sm; ++k) s += qrow[k] * hbar[k];
    qh[row] = s;
  }

  double disp = 0.0;
  Vec64 gdisp(sx, 0.0);
  Vec64 di(sm);
  for (const Node& nd : nodes_) {
    for (size_t row = 0; row < sm; ++row) {
      double s = nd.r[row] - r_avg_[row];
      const double* prow = nd.p.data() + row * sx;
      const double* arow = p_avg_.data() + row * sx;
      for (size_t k = 0; k < sx; ++k) s += (prow[k] - arow[k]) * x[k];
      di[row] = s;
    }
    disp += squared_norm(di);
    for (size_t k = 0; k < sx; ++k) {
      double s = 0.0;
      for (size_t row = 0; row < sm; ++row) {
        s += (nd.p[row * sx + k] - p_avg_[row * sx + k]) * di[row];
      }
      gdisp[k] += s;
    }
  }

  out.value = fbar - 0.5 * squared_norm(qh) - 0.5 * disp / n;
  out.grad.assign(sx, 0.0);
  for (size_t k = 0; k < sx; ++k) {
    double s = gbar[k] - gdisp[k] / n;
    for (size_t row = 0; row < sm; ++row) {
      s -= p_avg_[row * sx + k] * qh[row];
    }
    out.grad[k] = s;
  }
  return out;
}

} // namespace lsgda
