#include "lsgda/ncsc_toy.hpp"

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

} // namespace

NcscToy::NcscToy(int dim_x, int dim_y, double mu_y, std::vector<Node> nodes,
                 double noise_std)
    : dx_(dim_x), dy_(dim_y), mu_y_(mu_y), nodes_(std::move(nodes)),
      noise_std_(noise_std) {
  if (dx_ < 1 || dy_ < 1) throw ConfigError("NcscToy: dimensions must be >= 1");
  if (!(mu_y_ > 0.0)) throw ConfigError("NcscToy: mu_y must be > 0");
  if (nodes_.empty()) throw ConfigError("NcscToy: no nodes");
  if (!(noise_std_ >= 0.0) || !std::isfinite(noise_std_)) {
    throw ConfigError("NcscToy: noise_std must be >= 0");
  }
  const auto sx = static_cast<size_t>(dx_);
  const auto sy = static_cast<size_t>(dy_);
  for (const Node& nd : nodes_) {
    if (nd.c.size() != sx || nd.shift.size() != sx ||
        nd.b.size() != sx * sy) {
      throw DimensionError("NcscToy: node block sizes do not match dims");
    }
  }

  b_avg_.assign(sx * sy, 0.0);
  for (const Node& nd : nodes_) {
    for (size_t k = 0; k < nd.b.size(); ++k) b_avg_[k] += nd.b[k];
  }
  for (double& v : b_avg_) v /= static_cast<double>(nodes_.size());

  // |bump''| <= 2, so the primal block curvature of node i is bounded by
  // 2 max_k c_ik. Adding the coupling spectral norm and mu_y gives a joint
  // smoothness estimate.
  double l = 0.0;
  for (const Node& nd : nodes_) {
    double cmax = 0.0;
    for (double c : nd.c) cmax = std::max(cmax, std::abs(c));
    Eigen::MatrixXd b(dx_, dy_);
    for (int r = 0; r < dx_; ++r)
      for (int k = 0; k < dy_; ++k)
        b(r, k) = nd.b[static_cast<size_t>(r) * sy + static_cast<size_t>(k)];
    const double smax =
        Eigen::JacobiSVD<Eigen::MatrixXd>(b).singularValues().maxCoeff();
    l = std::max(l, 2.0 * cmax + smax + mu_y_);
  }
  constants_.smoothness = l;
  constants_.strong_convexity = mu_y_;
  constants_.noise_variance =
      noise_std_ * noise_std_ * static_cast<double>(std::max(dx_, dy_));
}

NcscToy NcscToy::random(int n_nodes, int dim_x, int dim_y, double mu_y,
                        double c_lo, double c_hi, double shift_std,
                        double b_std, double noise_std, uint64_t seed) {
  if (n_nodes < 1) throw ConfigError("NcscToy::random: n_nodes >= 1");
  if (!(0.0 < c_lo && c_lo <= c_hi)) {
    throw ConfigError("NcscToy::random: need 0 < c_lo <= c_hi");
  }
  RngStream rng(derive_worker_seed(seed, 0));
  const auto sx = static_cast<size_t>(dim_x);
  const auto sy = static_cast<size_t>(dim_y);
  std::vector<Node> nodes(static_cast<size_t>(n_nodes));
  for (Node& nd : nodes) {
    nd.c.resize(sx);
    nd.shift.resize(sx);
    nd.b.resize(sx * sy);
    for (auto& v : nd.c) v = rng.uniform(c_lo, c_hi);
    for (auto& v : nd.shift) v = shift_std * rng.normal();
    for (auto& v : nd.b) v = b_std * rng.normal();
  }
  return NcscToy(dim_x, dim_y, mu_y, std::move(nodes), noise_std);
}

double NcscToy::full_value(int node, const Vec64& x, const Vec64& y) const {
  check_point(node, x, y);
  const Node& nd = nodes_[static_cast<size_t>(node)];
  const auto sy = static_cast<size_t>(dy_);
  double v = 0.0;
  for (size_t k = 0; k < x.size(); ++k) v += nd.c[k] * bump(x[k] - nd.shift[k]);
  for (size_t r = 0; r < x.size(); ++r) {
    const double* brow = nd.b.data() + r * sy;
    double s = 0.0;
    for (size_t k = 0; k < sy; ++k) s += brow[k] * y[k];
    v += x[r] * s;
  }
  v -= 0.5 * mu_y_ * squared_norm(y);
  return v;
}

void NcscToy::full_grad(int node, const Vec64& x, const Vec64& y, Vec64& gx,
                        Vec64& gy) const {
  check_point(node, x, y);
  const Node& nd = nodes_[static_cast<size_t>(node)];
  const auto sx = static_cast<size_t>(dx_);
  const auto sy = static_cast<size_t>(dy_);
  gx.assign(sx, 0.0);
  gy.assign(sy, 0.0);
  for (size_t r = 0; r < sx; ++r) {
    double s = nd.c[r] * bump_deriv(x[r] - nd.shift[r]);
    const double* brow = nd.b.data() + r * sy;
    for (size_t k = 0; k < sy; ++k) s += brow[k] * y[k];
    gx[r] = s;
  }
  for (size_t k = 0; k < sy; ++k) {
    double s = -mu_y_ * y[k];
    for (size_t r = 0; r < sx; ++r) s += nd.b[r * sy + k] * x[r];
    gy[k] = s;
  }
}

void NcscToy::stochastic_grad_split(int node, const Vec64& x_primal,
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

EnvelopeEval NcscToy::envelope_eval(const Vec64& x) const {
  if (x.size() != static_cast<size_t>(dx_)) {
    throw DimensionError("NcscToy::envelope_eval: bad x size");
  }
  const auto sx = static_cast<size_t>(dx_);
  const auto sy = static_cast<size_t>(dy_);
  const double n = static_cast<double>(nodes_.size());

  // w = Bbar'x, y*(x) = w / mu_y
  Vec64 w(sy, 0.0);
  for (size_t k = 0; k < sy; ++k) {
    double s = 0.0;
    for (size_t r = 0; r < sx; ++r) s += b_avg_[r * sy + k] * x[r];
    w[k] = s;
  }

  EnvelopeEval out;
  double fbar = 0.0;
  Vec64 gbar(sx, 0.0);
  for (const Node& nd : nodes_) {
    for (size_t r = 0; r < sx; ++r) {
      fbar += nd.c[r] * bump(x[r] - nd.shift[r]);
      gbar[r] += nd.c[r] * bump_deriv(x[r] - nd.shift[r]);
    }
  }
  out.value = fbar / n + 0.5 * squared_norm(w) / mu_y_;
  out.grad.assign(sx, 0.0);
  for (size_t r = 0; r < sx; ++r) {
    double s = gbar[r] / n;
    const double* brow = b_avg_.data() + r * sy;
    for (size_t k = 0; k < sy; ++k) s += brow[k] * w[k] / mu_y_;
    out.grad[r] = s;
  }
  return out;
}

} // namespace lsgda
