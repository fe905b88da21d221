#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "lsgda/config.hpp"
#include "lsgda/problem.hpp"
#include "lsgda/trace.hpp"
#include "lsgda/vec.hpp"

namespace lsgda {

// Snapshot of the fleet at a trace point, passed to metrics hooks. x_avg and
// y_avg are the across-worker averages; when synced is true the workers were
// just overwritten with exactly these vectors.
struct RoundView {
  int64_t iter = 0;
  int64_t comm_round = 0;
  bool synced = false;
  const Vec64& x_avg;
  const Vec64& y_avg;
  const std::vector<WorkerState>& workers;
};

// Called once per trace row to fill the optional metric fields. Hooks run on
// the coordinating thread, never concurrently.
using MetricsHook = std::function<void(const RoundView&, TraceRecord&)>;

// WorkerParallel runs each worker's local steps on its own thread between
// barriers. Every worker's arithmetic is self-contained (own iterates, own
// stream) and all cross-worker reductions happen on the coordinating thread
// in ascending node order, so both modes produce bitwise identical results.
enum class ExecMode { Sequential, WorkerParallel };

struct RunResult {
  Vec64 x_avg;
  Vec64 y_avg;
  std::vector<TraceRecord> trace;
  int64_t communication_rounds_used = 0;
  int64_t total_local_steps = 0;
};

// Distributed simultaneous gradient descent ascent with periodic averaging.
// Every worker starts from (x0, y0) and its stream derived from
// cfg.master_seed and its node id. Each local step t draws one stochastic
// gradient pair at the worker's own iterates, moves x down and y up with the
// schedule values at t, then applies the problem's dual projection. Both
// blocks are averaged every cfg.sync_gap steps and once more at the end when
// T is not a multiple.
//
// The trace gets a row at iteration 0, at every averaging barrier, at every
// multiple of cfg.record_every (when nonzero) and at T. Iterates are checked
// at those points; a coordinate that is non-finite or exceeds 1e15 raises
// DivergenceError for the smallest offending node id.
RunResult run_local_sgda(const MinimaxProblem& prob, const RunConfig& cfg,
                         const Vec64& x0, const Vec64& y0,
                         const MetricsHook& hook = nullptr,
                         ExecMode mode = ExecMode::Sequential);

// Same loop, except the dual gradient of each step is taken at a stale
// primal anchor shared by all workers: g_y is evaluated at (anchor, y_i)
// while g_x keeps using (x_i, y_i), both from the same stochastic draw. The
// anchor starts at x0 and is refreshed to the current across-worker primal
// average every cfg.snapshot_gap steps, after any coincident averaging (so a
// refresh that lands on a sync barrier reuses that barrier's average
// bitwise). Anchor refreshes are counted as extra communication rounds.
RunResult run_local_sgda_plus(const MinimaxProblem& prob, const RunConfig& cfg,
                              const Vec64& x0, const Vec64& y0,
                              const MetricsHook& hook = nullptr,
                              ExecMode mode = ExecMode::Sequential);

} // namespace lsgda
