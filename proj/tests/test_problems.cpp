#include <cmath>
#include <vector>

#include "doctest.h"
#include "lsgda/dataset.hpp"
#include "lsgda/errors.hpp"
#include "lsgda/grad_check.hpp"
#include "lsgda/ncpl_toy.hpp"
#include "lsgda/ncsc_toy.hpp"
#include "lsgda/problem.hpp"
#include "lsgda/quadratic_saddle.hpp"
#include "lsgda/robust_linreg.hpp"
#include "lsgda/rng.hpp"
#include "lsgda/synthetic.hpp"

using namespace lsgda;

namespace {

Vec64 random_vec(RngStream& r, int dim, double scale) {
  Vec64 v(static_cast<size_t>(dim));
  for (double& c : v) c = scale * r.normal();
  return v;
}

// Two-node instance with diagonal blocks, hand-solvable:
//   A = diag(2,3), B = diag(1,0.5), C = diag(1,2),
//   pbar = (1,-2), qbar = (0.5,1), node offsets +-s on p only.
QuadraticSaddle make_diag_quadratic(double p_spread) {
  QuadraticSaddle::Node base;
  base.a = {2.0, 0.0, 0.0, 3.0};
  base.b = {1.0, 0.0, 0.0, 0.5};
  base.c = {1.0, 0.0, 0.0, 2.0};
  base.p = {1.0, -2.0};
  base.q = {0.5, 1.0};
  QuadraticSaddle::Node n0 = base, n1 = base;
  n0.p[0] += p_spread;
  n1.p[0] -= p_spread;
  return QuadraticSaddle(2, 2, {n0, n1}, 0.0);
}

} // namespace

TEST_CASE("quadratic saddle gradients match finite differences") {
  const QuadraticSaddle p =
      QuadraticSaddle::random(3, 4, 3, 0.5, 2.0, 0.7, 0.4, 0.0, 101);
  RngStream r(2024);
  for (int k = 0; k < 10; ++k) {
    const Vec64 x = random_vec(r, p.dim_x(), 1.0);
    const Vec64 y = random_vec(r, p.dim_y(), 1.0);
    const GradCheckResult g = check_node_gradient(p, k % 3, x, y, 1e-5);
    CHECK(g.max_rel_err_x <= 1e-6);
    CHECK(g.max_rel_err_y <= 1e-6);
  }
}

TEST_CASE("global gradient is the node average") {
  const QuadraticSaddle p =
      QuadraticSaddle::random(4, 3, 2, 0.5, 2.0, 0.6, 0.8, 0.0, 7);
  RngStream r(5);
  const Vec64 x = random_vec(r, 3, 1.0);
  const Vec64 y = random_vec(r, 2, 1.0);
  Vec64 gx, gy, sx(3, 0.0), sy(2, 0.0);
  for (int i = 0; i < 4; ++i) {
    p.full_grad(i, x, y, gx, gy);
    for (int k = 0; k < 3; ++k) sx[k] += gx[k];
    for (int k = 0; k < 2; ++k) sy[k] += gy[k];
  }
  Vec64 ax, ay;
  p.global_grad(x, y, ax, ay);
  for (int k = 0; k < 3; ++k) CHECK(ax[k] == doctest::Approx(sx[k] / 4.0).epsilon(1e-14));
  for (int k = 0; k < 2; ++k) CHECK(ay[k] == doctest::Approx(sy[k] / 4.0).epsilon(1e-14));
}

TEST_CASE("saddle oracle solves the hand-checked diagonal instance") {
  // Optimality: 2x1 + y1 = -1, 3x2 + 0.5 y2 = 2, x1 - y1 = -0.5,
  // 0.5 x2 - 2 y2 = -1 gives x* = (-0.5, 0.56), y* = (0, 0.64).
  const QuadraticSaddle p = make_diag_quadratic(0.3);
  const auto sp = p.saddle_oracle();
  REQUIRE(sp.has_value());
  CHECK(sp->x[0] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(sp->x[1] == doctest::Approx(0.56).epsilon(1e-12));
  CHECK(sp->y[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(sp->y[1] == doctest::Approx(0.64).epsilon(1e-12));
  CHECK(sp->residual <= 1e-10);

  // the averaged gradient vanishes there
  Vec64 gx, gy;
  p.global_grad(sp->x, sp->y, gx, gy);
  CHECK(squared_norm(gx) + squared_norm(gy) <= 1e-20);
}

TEST_CASE("saddle oracle flags a singular optimality system") {
  QuadraticSaddle::Node n;
  n.a = {1.0, 0.0, 0.0, 0.0}; // rank deficient, pbar hits the null space
  n.b = {0.0, 0.0, 0.0, 0.0};
  n.c = {1.0, 0.0, 0.0, 1.0};
  n.p = {0.0, 1.0};
  n.q = {0.0, 0.0};
  const QuadraticSaddle p(2, 2, {n}, 0.0);
  CHECK_THROWS_AS(p.saddle_oracle(), SingularSystemError);
}

TEST_CASE("quadratic envelope is the exact best response value") {
  const QuadraticSaddle p = make_diag_quadratic(0.25);
  const Vec64 x{0.2, -0.4};
  // w = B'x + q = (0.7, 0.8), y* = C^{-1} w = (0.7, 0.4)
  const Vec64 y_star{0.7, 0.4};
  const EnvelopeEval env = p.envelope_eval(x);
  CHECK(env.value == doctest::Approx(1.685).epsilon(1e-13));
  CHECK(env.grad[0] == doctest::Approx(2.1).epsilon(1e-13));
  CHECK(env.grad[1] == doctest::Approx(-3.0).epsilon(1e-13));
  CHECK(p.global_value(x, y_star) == doctest::Approx(env.value).epsilon(1e-13));

  // maximality: any other y gives a smaller value
  RngStream r(77);
  for (int k = 0; k < 20; ++k) {
    const Vec64 y = random_vec(r, 2, 1.5);
    CHECK(p.global_value(x, y) <= env.value + 1e-12);
  }
}

TEST_CASE("quadratic instance constants are consistent") {
  const QuadraticSaddle p =
      QuadraticSaddle::random(3, 4, 4, 0.5, 2.0, 0.5, 0.3, 0.1, 13);
  const ProblemConstants& pc = p.constants();
  CHECK_NOTHROW(pc.validate());
  CHECK(pc.strong_convexity >= 0.5 - 1e-9);
  CHECK(pc.smoothness >= pc.strong_convexity);
  // noise variance: per-coordinate sigma^2 summed over the larger block
  CHECK(pc.noise_variance == doctest::Approx(0.01 * 4).epsilon(1e-12));
}

TEST_CASE("quadratic stochastic gradient is unbiased") {
  const QuadraticSaddle p =
      QuadraticSaddle::random(2, 3, 2, 0.5, 2.0, 0.5, 0.4, 0.3, 3);
  RngStream probe(9);
  const Vec64 x = random_vec(probe, 3, 1.0);
  const Vec64 y = random_vec(probe, 2, 1.0);
  Vec64 fx, fy;
  p.full_grad(0, x, y, fx, fy);

  RngStream r(17);
  const int n = 10000;
  Vec64 mx(3, 0.0), my(2, 0.0), gx, gy;
  for (int i = 0; i < n; ++i) {
    p.stochastic_grad(0, x, y, 1, r, gx, gy);
    for (int k = 0; k < 3; ++k) mx[k] += gx[k];
    for (int k = 0; k < 2; ++k) my[k] += gy[k];
  }
  // noise std 0.3 per coordinate, so the mean is within 4 * 0.3/sqrt(n)
  const double tol = 4.0 * 0.3 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < 3; ++k) CHECK(std::abs(mx[k] / n - fx[k]) < tol);
  for (int k = 0; k < 2; ++k) CHECK(std::abs(my[k] / n - fy[k]) < tol);
}

TEST_CASE("aliased and split stochastic calls agree when the anchor is the iterate") {
  const QuadraticSaddle p =
      QuadraticSaddle::random(2, 3, 2, 0.5, 2.0, 0.5, 0.4, 0.2, 21);
  RngStream probe(31);
  const Vec64 x = random_vec(probe, 3, 1.0);
  const Vec64 y = random_vec(probe, 2, 1.0);
  const Vec64 x_other = x; // distinct object, equal values

  RngStream r1(55), r2(55);
  Vec64 gx1, gy1, gx2, gy2;
  p.stochastic_grad(0, x, y, 1, r1, gx1, gy1);
  p.stochastic_grad_split(0, x, x_other, y, 1, r2, gx2, gy2);
  CHECK(gx1 == gx2);
  CHECK(gy1 == gy2);
  // identical downstream consumption
  CHECK(r1.next_u64() == r2.next_u64());
}

TEST_CASE("ncsc envelope matches its closed-form best response") {
  const NcscToy p = NcscToy::random(3, 4, 3, 1.5, 0.5, 1.5, 0.4, 0.5, 0.0, 5);
  RngStream r(6);
  for (int k = 0; k < 10; ++k) {
    const Vec64 x = random_vec(r, 4, 1.0);
    const EnvelopeEval env = p.envelope_eval(x);

    // y*(x) = Bbar'x / mu_y, assembled from the node blocks
    Vec64 y_star(3, 0.0);
    for (int i = 0; i < 3; ++i) {
      const NcscToy::Node& nd = p.node(i);
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 3; ++b) y_star[b] += nd.b[a * 3 + b] * x[a];
      }
    }
    for (double& c : y_star) c /= 3.0 * 1.5;

    CHECK(p.global_value(x, y_star) == doctest::Approx(env.value).epsilon(1e-12));
    for (int j = 0; j < 8; ++j) {
      const Vec64 y = random_vec(r, 3, 1.2);
      CHECK(p.global_value(x, y) <= env.value + 1e-12);
    }

    const GradCheckResult g = check_node_gradient(p, k % 3, x, y_star, 1e-5);
    CHECK(g.max_rel_err_x <= 1e-6);
    CHECK(g.max_rel_err_y <= 1e-6);
    const GradCheckResult e = check_envelope_gradient(p, x, 1e-5);
    CHECK(e.max_rel_err_x <= 1e-6);
  }
}

TEST_CASE("bump stays bounded so the ncsc primal is bounded") {
  // f_i is a sum of dim_x wells, each in [0, c_ik]; the envelope adds a
  // nonnegative quadratic. Probe far-out points for sanity.
  const NcscToy p = NcscToy::random(2, 3, 2, 1.0, 0.5, 1.5, 0.3, 0.4, 0.0, 8);
  const Vec64 far{100.0, -100.0, 100.0};
  double cap = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (double c : p.node(i).c) cap += c;
  }
  cap /= 2.0;
  const Vec64 y0(2, 0.0);
  CHECK(p.global_value(far, y0) <= cap + 1e-9);
  CHECK(p.global_value(far, y0) >= 0.0);
}

TEST_CASE("ncpl dual satisfies the PL inequality with the reported modulus") {
  const NcplToy p =
      NcplToy::random_bounded(3, 4, 3, 3, 2, 0.5, 1.5, 0.3, 0.3, 0.0, 9);
  const double mu = p.pl_modulus();
  REQUIRE(mu > 0.0);
  RngStream r(10);
  for (int k = 0; k < 50; ++k) {
    const Vec64 x = random_vec(r, 4, 1.0);
    const Vec64 y = random_vec(r, 3, 1.5);
    const EnvelopeEval env = p.envelope_eval(x);
    Vec64 gx, gy;
    p.global_grad(x, y, gx, gy);
    const double gap = env.value - p.global_value(x, y);
    CHECK(gap >= -1e-10);
    CHECK(0.5 * squared_norm(gy) + 1e-9 >= mu * gap);
  }
}

TEST_CASE("ncpl gradients and envelope pass finite differences") {
  const NcplToy p =
      NcplToy::random_bounded(3, 4, 3, 3, 2, 0.5, 1.5, 0.3, 0.2, 0.0, 12);
  RngStream r(13);
  for (int k = 0; k < 10; ++k) {
    const Vec64 x = random_vec(r, 4, 0.8);
    const Vec64 y = random_vec(r, 3, 0.8);
    const GradCheckResult g = check_node_gradient(p, k % 3, x, y, 1e-5);
    CHECK(g.max_rel_err_x <= 1e-6);
    CHECK(g.max_rel_err_y <= 1e-6);
    const GradCheckResult e = check_envelope_gradient(p, x, 1e-5);
    CHECK(e.max_rel_err_x <= 1e-6);
  }
}

TEST_CASE("ncpl envelope is bounded below on the bounded factory") {
  const NcplToy p =
      NcplToy::random_bounded(4, 3, 4, 4, 2, 0.5, 1.5, 0.3, 0.4, 0.0, 22);
  RngStream r(23);
  const double at_zero = p.envelope_eval(Vec64(3, 0.0)).value;
  for (int k = 0; k < 30; ++k) {
    const Vec64 x = random_vec(r, 3, 30.0);
    // wells are bounded and the quadratic corrections are x-independent, so
    // far-out values stay within the well budget of the value at zero
    CHECK(p.envelope_eval(x).value >= at_zero - 4.0 * 1.5 * 3.0);
  }
}

TEST_CASE("robust regression objective identities at the origin") {
  SyntheticSpec spec;
  spec.kind = TaskKind::Regression;
  spec.n_nodes = 3;
  spec.dim = 4;
  spec.min_count = 30;
  spec.max_count = 40;
  spec.test_fraction = 0.25;
  spec.seed = 31;
  const FederatedDataset data = generate_synthetic(spec);

  RobustLinReg::Options opts; // penalty mode, lambda_x = 0
  const RobustLinReg p(data, opts);

  const Vec64 w0(4, 0.0), d0(4, 0.0);
  for (int i = 0; i < 3; ++i) {
    double mean_b2 = 0.0;
    for (double b : data.nodes[static_cast<size_t>(i)].targets) {
      mean_b2 += b * b;
    }
    mean_b2 /= static_cast<double>(data.nodes[static_cast<size_t>(i)].targets.size());
    CHECK(p.full_value(i, w0, d0) == doctest::Approx(mean_b2).epsilon(1e-13));
  }
}

TEST_CASE("robust regression eval matches the naive quadratic expansion") {
  SyntheticSpec spec;
  spec.kind = TaskKind::Regression;
  spec.n_nodes = 2;
  spec.dim = 3;
  spec.min_count = 25;
  spec.max_count = 30;
  spec.test_fraction = 0.3;
  spec.seed = 32;
  const FederatedDataset data = generate_synthetic(spec);
  RobustLinReg::Options opts;
  opts.lambda_x = 0.05;
  const RobustLinReg p(data, opts);

  RngStream r(33);
  const size_t n = data.test.targets.size();
  REQUIRE(n > 0);
  for (int k = 0; k < 8; ++k) {
    const Vec64 w = random_vec(r, 3, 0.7);
    const Vec64 d = random_vec(r, 3, 0.4);
    // direct: mean over the test pool of (w'(a + d) - b)^2 + ridge
    double direct = 0.0;
    for (size_t j = 0; j < n; ++j) {
      double pred = 0.0;
      for (int c = 0; c < 3; ++c) {
        pred += w[static_cast<size_t>(c)] *
                (data.test.features[j * 3 + static_cast<size_t>(c)] +
                 d[static_cast<size_t>(c)]);
      }
      const double res = pred - data.test.targets[j];
      direct += res * res;
    }
    direct = direct / static_cast<double>(n) + 0.5 * 0.05 * squared_norm(w);
    CHECK(p.eval_objective(w, d) == doctest::Approx(direct).epsilon(1e-12));

    // dual gradient identity: 2 (mean residual) w
    Vec64 grad;
    p.eval_dual_grad(w, d, grad);
    double mean_res = 0.0;
    for (size_t j = 0; j < n; ++j) {
      double pred = 0.0;
      for (int c = 0; c < 3; ++c) {
        pred += w[static_cast<size_t>(c)] *
                (data.test.features[j * 3 + static_cast<size_t>(c)] +
                 d[static_cast<size_t>(c)]);
      }
      mean_res += pred - data.test.targets[j];
    }
    mean_res /= static_cast<double>(n);
    for (int c = 0; c < 3; ++c) {
      CHECK(grad[static_cast<size_t>(c)] ==
            doctest::Approx(2.0 * mean_res * w[static_cast<size_t>(c)])
                .epsilon(1e-11));
    }
  }
}

TEST_CASE("robust regression gradients pass finite differences") {
  SyntheticSpec spec;
  spec.kind = TaskKind::Regression;
  spec.n_nodes = 3;
  spec.dim = 5;
  spec.min_count = 20;
  spec.max_count = 30;
  spec.seed = 34;
  const FederatedDataset data = generate_synthetic(spec);

  for (const bool ball : {false, true}) {
    RobustLinReg::Options opts;
    opts.lambda_x = 0.1;
    opts.mode = ball ? RobustLinReg::DualMode::Ball
                     : RobustLinReg::DualMode::Penalty;
    opts.lambda_y = 0.7;
    opts.ball_radius = 2.0;
    const RobustLinReg p(data, opts);
    RngStream r(35);
    for (int k = 0; k < 6; ++k) {
      const Vec64 x = random_vec(r, 5, 0.5);
      const Vec64 y = random_vec(r, 5, 0.3);
      const GradCheckResult g = check_node_gradient(p, k % 3, x, y, 1e-5);
      CHECK(g.max_rel_err_x <= 1e-6);
      CHECK(g.max_rel_err_y <= 1e-6);
    }
  }
}

TEST_CASE("robust regression stochastic batches are unbiased") {
  SyntheticSpec spec;
  spec.kind = TaskKind::Regression;
  spec.n_nodes = 2;
  spec.dim = 3;
  spec.min_count = 12;
  spec.max_count = 16;
  spec.seed = 36;
  const FederatedDataset data = generate_synthetic(spec);
  RobustLinReg::Options opts;
  const RobustLinReg p(data, opts);

  RngStream probe(37);
  const Vec64 x = random_vec(probe, 3, 0.5);
  const Vec64 y = random_vec(probe, 3, 0.3);
  Vec64 fx, fy;
  p.full_grad(0, x, y, fx, fy);

  RngStream r(38);
  const int n = 20000;
  Vec64 mx(3, 0.0), gx, gy;
  Vec64 second(3, 0.0);
  for (int i = 0; i < n; ++i) {
    p.stochastic_grad(0, x, y, 2, r, gx, gy);
    for (int k = 0; k < 3; ++k) {
      mx[k] += gx[k];
      second[k] += gx[k] * gx[k];
    }
  }
  for (int k = 0; k < 3; ++k) {
    const double mean = mx[k] / n;
    const double var = second[k] / n - mean * mean;
    const double tol = 5.0 * std::sqrt(var / n) + 1e-12;
    CHECK(std::abs(mean - fx[k]) < tol);
  }
}

TEST_CASE("ball mode projects the dual block onto the radius") {
  SyntheticSpec spec;
  spec.kind = TaskKind::Regression;
  spec.n_nodes = 2;
  spec.dim = 2;
  spec.min_count = 10;
  spec.max_count = 12;
  spec.seed = 39;
  const FederatedDataset data = generate_synthetic(spec);
  RobustLinReg::Options opts;
  opts.mode = RobustLinReg::DualMode::Ball;
  opts.ball_radius = 0.5;
  const RobustLinReg p(data, opts);
  CHECK(p.has_dual_constraint());
  CHECK(p.eval_ball_radius() == 0.5);

  Vec64 big{3.0, 4.0};
  p.project_dual(big);
  CHECK(norm(big) <= 0.5 + 0.0);
  CHECK(big[0] == doctest::Approx(0.3).epsilon(1e-15));

  RobustLinReg::Options pen;
  const RobustLinReg p2(data, pen);
  CHECK_FALSE(p2.has_dual_constraint());
  CHECK(p2.eval_ball_radius() == 1.0);
}

TEST_CASE("project_ball hits the textbook example exactly and is idempotent") {
  Vec64 v{3.0, 4.0};
  project_ball(v, 1.0);
  CHECK(v[0] == 0.6);
  CHECK(v[1] == 0.8);

  Vec64 inside{0.1, -0.2};
  const Vec64 copy = inside;
  project_ball(inside, 1.0);
  CHECK(inside == copy);

  RngStream r(40);
  for (int k = 0; k < 200; ++k) {
    Vec64 w = random_vec(r, 5, 3.0);
    project_ball(w, 1.3);
    const Vec64 once = w;
    project_ball(w, 1.3);
    CHECK(w == once);
    CHECK(norm(w) <= 1.3);
  }

  Vec64 z{1.0};
  CHECK_THROWS_AS(project_ball(z, 0.0), ConfigError);
}

TEST_CASE("dimension checks reject mis-sized inputs") {
  const QuadraticSaddle p =
      QuadraticSaddle::random(2, 3, 2, 0.5, 2.0, 0.5, 0.0, 0.0, 50);
  Vec64 gx, gy;
  CHECK_THROWS_AS(p.full_value(0, Vec64{1.0}, Vec64{1.0, 2.0}),
                  DimensionError);
  CHECK_THROWS_AS(p.full_grad(0, Vec64{1.0, 2.0, 3.0}, Vec64{1.0}, gx, gy),
                  DimensionError);
  CHECK_THROWS_AS(p.full_value(5, Vec64{1.0, 2.0, 3.0}, Vec64{1.0, 2.0}),
                  DimensionError);
}
