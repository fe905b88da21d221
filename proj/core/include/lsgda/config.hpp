#pragma once

#include <cstdint>
#include <optional>

#include "lsgda/schedule.hpp"

namespace lsgda {

// Regularity constants of a problem instance. L and mu describe joint
// smoothness and strong convexity-concavity; sigma_sq bounds the stochastic
// gradient variance. For data-driven families these are documented estimates
// computed at a reference point, not global certificates.
struct ProblemConstants {
  double smoothness = 0.0;        // L
  double strong_convexity = 0.0;  // mu (0 when merely nonconvex / PL)
  double noise_variance = 0.0;    // sigma^2
  std::optional<double> grad_bound;        // G_x, when known
  std::optional<double> domain_diameter;   // D, when the dual domain is bounded

  // L / mu; requires mu > 0.
  double kappa() const;

  // Smoothness of the primal envelope max_y F(x, y): L + kappa * L.
  double envelope_smoothness() const;

  // Throws ConfigError unless L > 0, mu >= 0 and L >= mu.
  void validate() const;
};

// Parameters of one simulated run.
struct RunConfig {
  int n_workers = 1;
  int64_t total_iters = 1;    // T
  int64_t sync_gap = 1;       // tau: average every tau local steps
  int64_t snapshot_gap = 1;   // S: stale-anchor refresh gap (stale-dual runs only)
  StepSchedule primal_schedule;
  StepSchedule dual_schedule;
  int batch_size = 1;
  uint64_t master_seed = 0;
  // 0: record the trace at communication rounds only. k > 0: additionally
  // record (without synchronizing) at iterations divisible by k.
  int64_t record_every = 0;

  // Throws ConfigError on violated bounds (n >= 1, T >= 1, 1 <= tau <= T,
  // S >= 1, batch >= 1, record_every >= 0, valid schedules).
  void validate() const;
};

}  // namespace lsgda
