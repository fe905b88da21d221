#include "lsgda/local_sgda.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "lsgda/errors.hpp"
#include "lsgda/metrics.hpp"

namespace lsgda {

namespace {

constexpr double kDivergenceLimit = 1e15;

bool block_diverged(const Vec64& v) {
  for (double c : v) {
    if (!std::isfinite(c) || std::abs(c) > kDivergenceLimit) return true;
  }
  return false;
}

// Smallest offending node id wins, so the error is deterministic.
void check_divergence(const std::vector<WorkerState>& ws, int64_t iter) {
  for (const WorkerState& w : ws) {
    if (block_diverged(w.x) || block_diverged(w.y)) {
      throw DivergenceError(iter, w.node_id,
                            "iterates diverged (non-finite or beyond 1e15) at "
                            "iteration " +
                                std::to_string(iter) + ", node " +
                                std::to_string(w.node_id));
    }
  }
}

Vec64 average_block(const std::vector<WorkerState>& ws, bool primal) {
  std::vector<const Vec64*> ptrs;
  ptrs.reserve(ws.size());
  for (const WorkerState& w : ws) ptrs.push_back(primal ? &w.x : &w.y);
  return average_vectors(ptrs);
}

RunResult run_impl(const MinimaxProblem& prob, const RunConfig& cfg,
                   const Vec64& x0, const Vec64& y0, bool stale_dual,
                   const MetricsHook& hook, ExecMode mode) {
  cfg.validate();
  if (cfg.n_workers != prob.n_nodes()) {
    throw ConfigError("run: config has " + std::to_string(cfg.n_workers) +
                      " workers but the problem defines " +
                      std::to_string(prob.n_nodes()) + " nodes");
  }
  if (x0.size() != static_cast<size_t>(prob.dim_x()) ||
      y0.size() != static_cast<size_t>(prob.dim_y())) {
    throw DimensionError("run: start point does not match problem dims");
  }
  check_finite(x0, "x0");
  check_finite(y0, "y0");

  const int n = cfg.n_workers;
  const int64_t total = cfg.total_iters;
  const bool constrained = prob.has_dual_constraint();
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  std::vector<WorkerState> ws;
  ws.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    ws.push_back(WorkerState{i, x0, y0,
                             RngStream(derive_worker_seed(cfg.master_seed,
                                                          static_cast<uint64_t>(i)))});
  }

  // Stale primal anchor for the dual gradients; refreshed at snapshot
  // barriers. Unused in the plain variant.
  Vec64 anchor = stale_dual ? x0 : Vec64{};

  RunResult out;
  int64_t rounds = 0;

  auto emit = [&](int64_t iter, bool synced, const Vec64& xa, const Vec64& ya) {
    TraceRecord rec;
    rec.iter = iter;
    rec.comm_round = rounds;
    const auto dev = compute_deviation(ws, xa, ya);
    rec.deviation_x = dev.first;
    rec.deviation_y = dev.second;
    rec.wallclock_seconds = elapsed();
    if (hook) {
      const RoundView view{iter, rounds, synced, xa, ya, ws};
      hook(view, rec);
    }
    out.trace.push_back(std::move(rec));
  };

  // Workers hold bitwise copies of (x0, y0) here, so the deviations in the
  // initial row are exactly zero.
  emit(0, true, x0, y0);

  auto run_segment = [&](WorkerState& w, int64_t t_begin, int64_t t_end) {
    Vec64 gx, gy;
    for (int64_t t = t_begin; t < t_end; ++t) {
      const double eta_x = cfg.primal_schedule.eval(t);
      const double eta_y = cfg.dual_schedule.eval(t);
      if (stale_dual) {
        prob.stochastic_grad_split(w.node_id, w.x, anchor, w.y,
                                   cfg.batch_size, w.rng, gx, gy);
      } else {
        prob.stochastic_grad(w.node_id, w.x, w.y, cfg.batch_size, w.rng, gx,
                             gy);
      }
      for (size_t k = 0; k < w.x.size(); ++k) w.x[k] -= eta_x * gx[k];
      for (size_t k = 0; k < w.y.size(); ++k) w.y[k] += eta_y * gy[k];
      if (constrained) prob.project_dual(w.y);
    }
  };

  auto next_multiple = [](int64_t cur, int64_t gap) {
    return (cur / gap + 1) * gap;
  };

  Vec64 xa = x0;
  Vec64 ya = y0;
  int64_t e = 0;
  while (e < total) {
    int64_t next = next_multiple(e, cfg.sync_gap);
    if (stale_dual) {
      next = std::min(next, next_multiple(e, cfg.snapshot_gap));
    }
    if (cfg.record_every > 0) {
      next = std::min(next, next_multiple(e, cfg.record_every));
    }
    next = std::min(next, total);

    if (mode == ExecMode::WorkerParallel && n > 1) {
      std::vector<std::exception_ptr> errors(static_cast<size_t>(n));
      std::vector<std::thread> threads;
      threads.reserve(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i) {
        threads.emplace_back([&, i] {
          try {
            run_segment(ws[static_cast<size_t>(i)], e, next);
          } catch (...) {
            errors[static_cast<size_t>(i)] = std::current_exception();
          }
        });
      }
      for (std::thread& th : threads) th.join();
      for (const std::exception_ptr& err : errors) {
        if (err) std::rethrow_exception(err);
      }
    } else {
      for (int i = 0; i < n; ++i) run_segment(ws[static_cast<size_t>(i)], e, next);
    }
    e = next;

    check_divergence(ws, e);

    const bool do_sync = (e % cfg.sync_gap == 0) || e == total;
    const bool do_snapshot = stale_dual && e % cfg.snapshot_gap == 0;
    if (do_sync) {
      xa = average_block(ws, true);
      ya = average_block(ws, false);
      for (WorkerState& w : ws) {
        w.x = xa;
        w.y = ya;
      }
      ++rounds;
    }
    if (do_snapshot) {
      // Reuse the freshly assigned average bitwise when the refresh lands
      // on a sync barrier.
      anchor = do_sync ? xa : average_block(ws, true);
      ++rounds;
    }
    const bool do_record =
        do_sync || e == total ||
        (cfg.record_every > 0 && e % cfg.record_every == 0);
    if (do_record) {
      if (!do_sync) {
        xa = average_block(ws, true);
        ya = average_block(ws, false);
      }
      emit(e, do_sync, xa, ya);
    }
  }

  out.x_avg = xa;
  out.y_avg = ya;
  out.communication_rounds_used = rounds;
  out.total_local_steps = total * n;
  return out;
}

} // namespace

RunResult run_local_sgda(const MinimaxProblem& prob, const RunConfig& cfg,
                         const Vec64& x0, const Vec64& y0,
                         const MetricsHook& hook, ExecMode mode) {
  return run_impl(prob, cfg, x0, y0, false, hook, mode);
}

RunResult run_local_sgda_plus(const MinimaxProblem& prob, const RunConfig& cfg,
                              const Vec64& x0, const Vec64& y0,
                              const MetricsHook& hook, ExecMode mode) {
  return run_impl(prob, cfg, x0, y0, true, hook, mode);
}

} // namespace lsgda
