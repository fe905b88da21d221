#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "lsgda/config.hpp"
#include "lsgda/schedule.hpp"

namespace lsgda {

// Problem regimes with analyzed step-size and averaging-gap rules. Given the
// iteration budget T, the worker count n and the instance constants, each
// regime fixes tau (and for stale-anchor regimes the anchor refresh gap S)
// plus both schedules.
enum class Regime {
  ScScHomogeneous,   // strongly convex-concave, identical node objectives
  ScScHeterogeneous, // strongly convex-concave, arbitrary heterogeneity
  NcSc,              // nonconvex primal, strongly concave dual
  NcPl,              // nonconvex primal, PL dual (stale-anchor variant)
  NcOc,              // nonconvex primal, only concave dual (stale-anchor)
};

// The PL regime has two analyzed parameterizations that trade snapshot
// staleness against averaging frequency.
enum class NcplVariant {
  LongSnapshot, // tau ~ T^(1/3), anchor gap ~ T^(2/3)
  EqualGaps,    // tau = anchor gap = (T/n^2)^(1/3)
};

struct PresetRequest {
  Regime regime = Regime::ScScHeterogeneous;
  int n_workers = 1;
  int64_t total_iters = 1;
  ProblemConstants constants;
  NcplVariant ncpl_variant = NcplVariant::LongSnapshot;
  // Overrides the anchor gap to tau^2 (stale-anchor regimes only).
  bool snapshot_tau_squared = false;
};

struct PresetResult {
  int64_t sync_gap = 1;
  std::optional<int64_t> snapshot_gap; // set for stale-anchor regimes
  StepSchedule primal;
  StepSchedule dual;
};

// Gap rules (all counts are clamped to >= 1; fractional roots are floored
// against exact integer predicates, never against rounded pow output):
//   ScScHomogeneous:   tau = T / (n ln T), eta = 4 ln T / (mu T), needs T >= 2
//   ScScHeterogeneous: tau = largest k with k^2 n <= T,
//                      eta_t = 8 / (mu (t + a)),
//                      a = max(2048 kappa^2 tau, 1024 sqrt(2) kappa^2 tau,
//                              256 kappa^2)
//   NcSc: tau = largest k with k^3 n <= T,
//         eta_x = n^(1/3) / (L T^(2/3)), eta_y = 2 / (L sqrt(T))
//   NcPl/LongSnapshot: tau = largest k with k^3 <= T,
//                      S = largest k with k^3 <= T^2,
//                      eta_x = n^(1/3) / (L T^(2/3)),
//                      eta_y = n^(1/3) / (L sqrt(T))
//   NcPl/EqualGaps:    tau = S = largest k with k^3 n^2 <= T, same etas
//   NcOc: tau = largest k with k^6 n <= T^2,
//         S = largest k with k^3 <= T^2,
//         eta_x = 1 / (L T^(5/6)), eta_y = 1 / (4 L sqrt(T))
PresetResult make_preset(const PresetRequest& req);

// Applies a preset onto a run config in place (sync_gap, snapshot_gap when
// present, both schedules).
void apply_preset(const PresetResult& preset, RunConfig& cfg);

Regime regime_from_string(const std::string& name);
std::string to_string(Regime regime);
NcplVariant ncpl_variant_from_string(const std::string& name);
std::string to_string(NcplVariant variant);

} // namespace lsgda
