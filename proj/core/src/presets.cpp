#include "lsgda/presets.hpp"

#include <algorithm>
#include <cmath>

#include "lsgda/errors.hpp"

namespace lsgda {

namespace {

using i128 = __int128;

// Largest k >= 1 with pred(k) true, assuming pred is monotone decreasing in
// k and pred(1) may be false (then 1 is returned anyway: gaps are clamped).
// `guess` comes from floating-point root-taking and is only a starting
// point; the exact integer predicate has the final say.
template <class Pred>
int64_t largest_true(int64_t guess, Pred pred) {
  int64_t k = std::max<int64_t>(1, guess);
  while (pred(k + 1)) ++k;
  while (k > 1 && !pred(k)) --k;
  return k;
}

int64_t floor_root_k2n(int64_t t, int64_t n) {
  // largest k with k^2 * n <= t
  const double guess = std::floor(std::sqrt(static_cast<double>(t) /
                                            static_cast<double>(n)));
  return largest_true(static_cast<int64_t>(guess), [&](int64_t k) {
    return i128(k) * k * n <= i128(t);
  });
}

int64_t floor_root_k3n(int64_t t, int64_t n) {
  // largest k with k^3 * n <= t
  const double guess = std::floor(std::cbrt(static_cast<double>(t) /
                                            static_cast<double>(n)));
  return largest_true(static_cast<int64_t>(guess), [&](int64_t k) {
    return i128(k) * k * k * n <= i128(t);
  });
}

int64_t floor_root_k3_t2(int64_t t) {
  // largest k with k^3 <= t^2
  const double guess =
      std::floor(std::pow(static_cast<double>(t), 2.0 / 3.0));
  return largest_true(static_cast<int64_t>(guess), [&](int64_t k) {
    return i128(k) * k * k <= i128(t) * t;
  });
}

int64_t floor_root_k6n_t2(int64_t t, int64_t n) {
  // largest k with k^6 * n <= t^2
  const double guess = std::floor(
      std::pow(static_cast<double>(t) * static_cast<double>(t) /
                   static_cast<double>(n),
               1.0 / 6.0));
  return largest_true(static_cast<int64_t>(guess), [&](int64_t k) {
    const i128 k2 = i128(k) * k;
    return k2 * k2 * k2 * n <= i128(t) * t;
  });
}

} // namespace

PresetResult make_preset(const PresetRequest& req) {
  if (req.n_workers < 1) throw ConfigError("preset: n_workers must be >= 1");
  if (req.total_iters < 1) throw ConfigError("preset: total_iters must be >= 1");
  req.constants.validate();
  const double l = req.constants.smoothness;
  const double mu = req.constants.strong_convexity;
  const auto t = req.total_iters;
  const auto n = static_cast<int64_t>(req.n_workers);
  const double td = static_cast<double>(t);
  const double nd = static_cast<double>(n);

  const bool stale_anchor = req.regime == Regime::NcPl || req.regime == Regime::NcOc;
  if (req.snapshot_tau_squared && !stale_anchor) {
    throw ConfigError("preset: snapshot_tau_squared only applies to "
                      "stale-anchor regimes");
  }

  PresetResult out;
  switch (req.regime) {
    case Regime::ScScHomogeneous: {
      if (!(mu > 0.0)) throw ConfigError("preset: regime needs mu > 0");
      if (t < 2) throw ConfigError("preset: scsc_homog needs total_iters >= 2");
      const double log_t = std::log(td);
      out.sync_gap = std::max<int64_t>(
          1, static_cast<int64_t>(std::floor(td / (nd * log_t))));
      const double eta = 4.0 * log_t / (mu * td);
      out.primal = StepSchedule::constant(eta);
      out.dual = StepSchedule::constant(eta);
      break;
    }
    case Regime::ScScHeterogeneous: {
      if (!(mu > 0.0)) throw ConfigError("preset: regime needs mu > 0");
      out.sync_gap = floor_root_k2n(t, n);
      const double kappa_sq = req.constants.kappa() * req.constants.kappa();
      const double tau = static_cast<double>(out.sync_gap);
      const double a =
          std::max({2048.0 * kappa_sq * tau,
                    1024.0 * std::sqrt(2.0) * tau * kappa_sq,
                    256.0 * kappa_sq});
      out.primal = StepSchedule::inverse_time(mu, std::max(1.0, a));
      out.dual = StepSchedule::inverse_time(mu, std::max(1.0, a));
      break;
    }
    case Regime::NcSc: {
      out.sync_gap = floor_root_k3n(t, n);
      out.primal = StepSchedule::constant(std::cbrt(nd) /
                                          (l * std::pow(td, 2.0 / 3.0)));
      out.dual = StepSchedule::constant(2.0 / (l * std::sqrt(td)));
      break;
    }
    case Regime::NcPl: {
      if (req.ncpl_variant == NcplVariant::LongSnapshot) {
        out.sync_gap = floor_root_k3n(t, 1);
        out.snapshot_gap = floor_root_k3_t2(t);
      } else {
        const int64_t gap = floor_root_k3n(t, n * n);
        out.sync_gap = gap;
        out.snapshot_gap = gap;
      }
      out.primal = StepSchedule::constant(std::cbrt(nd) /
                                          (l * std::pow(td, 2.0 / 3.0)));
      out.dual = StepSchedule::constant(std::cbrt(nd) / (l * std::sqrt(td)));
      break;
    }
    case Regime::NcOc: {
      out.sync_gap = floor_root_k6n_t2(t, n);
      out.snapshot_gap = floor_root_k3_t2(t);
      out.primal =
          StepSchedule::constant(1.0 / (l * std::pow(td, 5.0 / 6.0)));
      out.dual = StepSchedule::constant(1.0 / (4.0 * l * std::sqrt(td)));
      break;
    }
  }

  if (req.snapshot_tau_squared) {
    out.snapshot_gap = out.sync_gap * out.sync_gap;
  }
  // Gaps beyond T behave like "never" but keep the config valid.
  out.sync_gap = std::min(out.sync_gap, t);
  return out;
}

void apply_preset(const PresetResult& preset, RunConfig& cfg) {
  cfg.sync_gap = preset.sync_gap;
  if (preset.snapshot_gap.has_value()) cfg.snapshot_gap = *preset.snapshot_gap;
  cfg.primal_schedule = preset.primal;
  cfg.dual_schedule = preset.dual;
}

Regime regime_from_string(const std::string& name) {
  if (name == "scsc_homog") return Regime::ScScHomogeneous;
  if (name == "scsc_hetero") return Regime::ScScHeterogeneous;
  if (name == "ncsc") return Regime::NcSc;
  if (name == "ncpl") return Regime::NcPl;
  if (name == "ncoc") return Regime::NcOc;
  throw ConfigError("unknown regime '" + name +
                    "' (expected scsc_homog, scsc_hetero, ncsc, ncpl, ncoc)");
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::ScScHomogeneous: return "scsc_homog";
    case Regime::ScScHeterogeneous: return "scsc_hetero";
    case Regime::NcSc: return "ncsc";
    case Regime::NcPl: return "ncpl";
    case Regime::NcOc: return "ncoc";
  }
  throw ConfigError("unknown regime enum value");
}

NcplVariant ncpl_variant_from_string(const std::string& name) {
  if (name == "long_snapshot") return NcplVariant::LongSnapshot;
  if (name == "equal_gaps") return NcplVariant::EqualGaps;
  throw ConfigError("unknown ncpl variant '" + name +
                    "' (expected long_snapshot or equal_gaps)");
}

std::string to_string(NcplVariant variant) {
  switch (variant) {
    case NcplVariant::LongSnapshot: return "long_snapshot";
    case NcplVariant::EqualGaps: return "equal_gaps";
  }
  throw ConfigError("unknown ncpl variant enum value");
}

} // namespace lsgda
