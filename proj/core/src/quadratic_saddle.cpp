#include "lsgda/quadratic_saddle.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <utility>

#include "lsgda/errors.hpp"

namespace lsgda {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd as_matrix(const Vec64& flat, int rows, int cols) {
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>>(flat.data(), rows,
                                                          cols);
}

VectorXd as_vector(const Vec64& v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<long>(v.size()));
}

Vec64 to_vec(const VectorXd& v) {
  return Vec64(v.data(), v.data() + v.size());
}

// Random orthogonal basis times eigenvalues in [lo, hi]: SPD with a known
// spectrum range.
MatrixXd random_spd(int d, double lo, double hi, RngStream& rng) {
  MatrixXd g(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) g(r, c) = rng.normal();
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd q = qr.householderQ();
  VectorXd eig(d);
  for (int k = 0; k < d; ++k) eig(k) = rng.uniform(lo, hi);
  if (d > 0) {
    // Pin the spectrum ends so the instance truly attains mu and l_max.
    eig(0) = lo;
    if (d > 1) eig(d - 1) = hi;
  }
  return q * eig.asDiagonal() * q.transpose();
}

}  // namespace

QuadraticSaddle::QuadraticSaddle(int dim_x, int dim_y, std::vector<Node> nodes,
                                 double noise_std)
    : dx_(dim_x), dy_(dim_y), nodes_(std::move(nodes)), noise_std_(noise_std) {
  if (dx_ < 1 || dy_ < 1) {
    throw ConfigError("QuadraticSaddle: dimensions must be >= 1");
  }
  if (nodes_.empty()) throw ConfigError("QuadraticSaddle: no nodes");
  if (!(noise_std_ >= 0.0) || !std::isfinite(noise_std_)) {
    throw ConfigError("QuadraticSaddle: noise_std must be >= 0");
  }
  const auto sx = static_cast<size_t>(dx_);
  const auto sy = static_cast<size_t>(dy_);
  for (const Node& nd : nodes_) {
    if (nd.a.size() != sx * sx || nd.b.size() != sx * sy ||
        nd.c.size() != sy * sy || nd.p.size() != sx || nd.q.size() != sy) {
      throw DimensionError("QuadraticSaddle: node block sizes do not match "
                           "(dim_x, dim_y)");
    }
  }

  const auto n = nodes_.size();
  avg_.a.assign(sx * sx, 0.0);
  avg_.b.assign(sx * sy, 0.0);
  avg_.c.assign(sy * sy, 0.0);
  avg_.p.assign(sx, 0.0);
  avg_.q.assign(sy, 0.0);
  for (const Node& nd : nodes_) {
    for (size_t k = 0; k < nd.a.size(); ++k) avg_.a[k] += nd.a[k];
    for (size_t k = 0; k < nd.b.size(); ++k) avg_.b[k] += nd.b[k];
    for (size_t k = 0; k < nd.c.size(); ++k) avg_.c[k] += nd.c[k];
    for (size_t k = 0; k < nd.p.size(); ++k) avg_.p[k] += nd.p[k];
    for (size_t k = 0; k < nd.q.size(); ++k) avg_.q[k] += nd.q[k];
  }
  const auto dn = static_cast<double>(n);
  for (double& v : avg_.a) v /= dn;
  for (double& v : avg_.b) v /= dn;
  for (double& v : avg_.c) v /= dn;
  for (double& v : avg_.p) v /= dn;
  for (double& v : avg_.q) v /= dn;

  // True constants from the per-node Hessians [A_i B_i; B_i' -C_i].
  double l = 0.0;
  double mu = std::numeric_limits<double>::infinity();
  for (const Node& nd : nodes_) {
    MatrixXd h(dx_ + dy_, dx_ + dy_);
    h.topLeftCorner(dx_, dx_) = as_matrix(nd.a, dx_, dx_);
    h.topRightCorner(dx_, dy_) = as_matrix(nd.b, dx_, dy_);
    h.bottomLeftCorner(dy_, dx_) = as_matrix(nd.b, dx_, dy_).transpose();
    h.bottomRightCorner(dy_, dy_) = -as_matrix(nd.c, dy_, dy_);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(h);
    l = std::max(l, es.eigenvalues().cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<MatrixXd> ea(as_matrix(nd.a, dx_, dx_));
    Eigen::SelfAdjointEigenSolver<MatrixXd> ec(as_matrix(nd.c, dy_, dy_));
    mu = std::min({mu, ea.eigenvalues().minCoeff(),
                   ec.eigenvalues().minCoeff()});
  }
  constants_.smoothness = l;
  constants_.strong_convexity = std::max(0.0, std::min(mu, l));
  constants_.noise_variance =
      noise_std_ * noise_std_ * static_cast<double>(std::max(dx_, dy_));
}

QuadraticSaddle QuadraticSaddle::random(int n_nodes, int dim_x, int dim_y,
                                        double mu, double l_max,
                                        double coupling, double spread,
                                        double noise_std, uint64_t seed) {
  if (n_nodes < 1) throw ConfigError("QuadraticSaddle::random: n_nodes >= 1");
  if (!(mu > 0.0) || !(l_max >= mu)) {
    throw ConfigError("QuadraticSaddle::random: need 0 < mu <= l_max");
  }
  RngStream rng(derive_worker_seed(seed, 0));

  const auto sx = static_cast<size_t>(dim_x);
  const auto sy = static_cast<size_t>(dim_y);
  Node shared;
  shared.p.resize(sx);
  shared.q.resize(sy);
  {
    MatrixXd a = random_spd(dim_x, mu, l_max, rng);
    MatrixXd c = random_spd(dim_y, mu, l_max, rng);
    MatrixXd b(dim_x, dim_y);
    for (int r = 0; r < dim_x; ++r)
      for (int k = 0; k < dim_y; ++k) b(r, k) = coupling * rng.normal();
    shared.a.assign(a.data(), a.data() + a.size());
    // Eigen stores column-major; transpose copy keeps our row-major layout.
    MatrixXd bt = b.transpose();
    shared.b.assign(bt.data(), bt.data() + bt.size());
    MatrixXd ct = c;  // symmetric, layout irrelevant
    shared.c.assign(ct.data(), ct.data() + ct.size());
    for (auto& v : shared.p) v = rng.normal();
    for (auto& v : shared.q) v = rng.normal();
  }

  std::vector<Node> nodes(static_cast<size_t>(n_nodes), shared);
  if (spread > 0.0 && n_nodes > 1) {
    // Zero-mean per-node offsets on the linear terms: pair k gets +d and -d,
    // so pbar/qbar stay at the shared values.
    for (int i = 0; i + 1 < n_nodes; i += 2) {
      for (size_t k = 0; k < sx; ++k) {
        const double d = spread * rng.normal();
        nodes[static_cast<size_t>(i)].p[k] += d;
        nodes[static_cast<size_t>(i) + 1].p[k] -= d;
      }
      for (size_t k = 0; k < sy; ++k) {
        const double d = spread * rng.normal();
        nodes[static_cast<size_t>(i)].q[k] += d;
        nodes[static_cast<size_t>(i) + 1].q[k] -= d;
      }
    }
  }
  return QuadraticSaddle(dim_x, dim_y, std::move(nodes), noise_std);
}

double QuadraticSaddle::full_value(int node, const Vec64& x,
                                   const Vec64& y) const {
  check_point(node, x, y);
  const Node& nd = nodes_[static_cast<size_t>(node)];
  const VectorXd xe = as_vector(x);
  const VectorXd ye = as_vector(y);
  const MatrixXd a = as_matrix(nd.a, dx_, dx_);
  const MatrixXd b = as_matrix(nd.b, dx_, dy_);
  const MatrixXd c = as_matrix(nd.c, dy_, dy_);
  return 0.5 * xe.dot(a * xe) + xe.dot(b * ye) - 0.5 * ye.dot(c * ye) +
         as_vector(nd.p).dot(xe) + as_vector(nd.q).dot(ye);
}

void QuadraticSaddle::full_grad(int node, const Vec64& x, const Vec64& y,
                                Vec64& gx, Vec64& gy) const {
  check_point(node, x, y);
  const Node& nd = nodes_[static_cast<size_t>(node)];
  gx.assign(static_cast<size_t>(dx_), 0.0);
  gy.assign(static_cast<size_t>(dy_), 0.0);
  // gx = A x + B y + p ; gy = B'x - C y + q. Plain loops over the row-major
  // blocks keep the arithmetic order fixed.
  for (int r = 0; r < dx_; ++r) {
    double s = nd.p[static_cast<size_t>(r)];
    const double* arow = nd.a.data() + static_cast<size_t>(r) * dx_;
    for (int k = 0; k < dx_; ++k) s += arow[k] * x[static_cast<size_t>(k)];
    const double* brow = nd.b.data() + static_cast<size_t>(r) * dy_;
    for (int k = 0; k < dy_; ++k) s += brow[k] * y[static_cast<size_t>(k)];
    gx[static_cast<size_t>(r)] = s;
  }
  for (int r = 0; r < dy_; ++r) {
    double s = nd.q[static_cast<size_t>(r)];
    for (int k = 0; k < dx_; ++k) {
      s += nd.b[static_cast<size_t>(k) * dy_ + static_cast<size_t>(r)] *
           x[static_cast<size_t>(k)];
    }
    const double* crow = nd.c.data() + static_cast<size_t>(r) * dy_;
    for (int k = 0; k < dy_; ++k) s -= crow[k] * y[static_cast<size_t>(k)];
    gy[static_cast<size_t>(r)] = s;
  }
}

void QuadraticSaddle::stochastic_grad_split(int node, const Vec64& x_primal,
                                            const Vec64& x_dual,
                                            const Vec64& y, int /*batch_size*/,
                                            RngStream& rng, Vec64& gx,
                                            Vec64& gy) const {
  Vec64 tmp_y(static_cast<size_t>(dy_));
  full_grad(node, x_primal, y, gx, tmp_y);
  if (&x_dual == &x_primal) {
    gy = tmp_y;
  } else {
    Vec64 tmp_x(static_cast<size_t>(dx_));
    full_grad(node, x_dual, y, tmp_x, gy);
  }
  // Noise order: primal block coordinates first, then dual block.
  for (double& g : gx) g += noise_std_ * rng.normal();
  for (double& g : gy) g += noise_std_ * rng.normal();
}

std::optional<SaddlePoint> QuadraticSaddle::saddle_oracle() const {
  const int d = dx_ + dy_;
  MatrixXd m(d, d);
  m.topLeftCorner(dx_, dx_) = as_matrix(avg_.a, dx_, dx_);
  m.topRightCorner(dx_, dy_) = as_matrix(avg_.b, dx_, dy_);
  m.bottomLeftCorner(dy_, dx_) = as_matrix(avg_.b, dx_, dy_).transpose();
  m.bottomRightCorner(dy_, dy_) = -as_matrix(avg_.c, dy_, dy_);
  VectorXd rhs(d);
  rhs.head(dx_) = -as_vector(avg_.p);
  rhs.tail(dy_) = -as_vector(avg_.q);

  Eigen::PartialPivLU<MatrixXd> lu(m);
  const VectorXd z = lu.solve(rhs);
  const double residual = (m * z - rhs).norm();
  if (!z.allFinite() || residual > 1e-8 * (1.0 + rhs.norm())) {
    throw SingularSystemError(
        "saddle oracle: optimality system is singular or ill-conditioned "
        "(residual " + std::to_string(residual) + ")");
  }
  SaddlePoint sp;
  sp.x = to_vec(z.head(dx_));
  sp.y = to_vec(z.tail(dy_));
  sp.residual = residual;
  return sp;
}

EnvelopeEval QuadraticSaddle::envelope_eval(const Vec64& x) const {
  const VectorXd xe = as_vector(x);
  const MatrixXd a = as_matrix(avg_.a, dx_, dx_);
  const MatrixXd b = as_matrix(avg_.b, dx_, dy_);
  const MatrixXd c = as_matrix(avg_.c, dy_, dy_);
  const VectorXd p = as_vector(avg_.p);
  const VectorXd q = as_vector(avg_.q);

  Eigen::LDLT<MatrixXd> ldlt(c);
  if (ldlt.info() != Eigen::Success) {
    throw SingularSystemError("envelope: averaged dual curvature is not "
                              "positive definite");
  }
  const VectorXd w = b.transpose() * xe + q;    // Bbar'x + qbar
  const VectorXd cw = ldlt.solve(w);            // y*(x)
  EnvelopeEval out;
  out.value = 0.5 * xe.dot(a * xe) + p.dot(xe) + 0.5 * w.dot(cw);
  out.grad = to_vec(a * xe + p + b * cw);
  return out;
}

}  // namespace lsgda
