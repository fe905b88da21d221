#pragma once

#include <cstdint>
#include <optional>

#include "lsgda/rng.hpp"
#include "lsgda/vec.hpp"

namespace lsgda {

// One simulated node: private iterates plus a private random stream.
struct WorkerState {
  int node_id = 0;
  Vec64 x;
  Vec64 y;
  RngStream rng;
};

// One trace row. Rows recorded immediately after an averaging step have
// deviation_x == deviation_y == 0 exactly, because every worker then holds a
// bitwise copy of the average. Optional fields are filled by metrics hooks.
struct TraceRecord {
  int64_t iter = 0;        // local iterations completed when the row was taken
  int64_t comm_round = 0;  // averaging events completed by then
  double deviation_x = 0.0;
  double deviation_y = 0.0;
  std::optional<double> objective;
  std::optional<double> dist_to_saddle;
  std::optional<double> robust_loss;
  std::optional<double> envelope_grad_norm;
  // Seconds since the run started; a runtime diagnostic that is deliberately
  // excluded from serialized traces so reruns stay byte-identical.
  double wallclock_seconds = 0.0;
};

}  // namespace lsgda
