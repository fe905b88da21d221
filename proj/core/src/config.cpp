#include "lsgda/config.hpp"

#include <cmath>
#include <string>

#include "lsgda/errors.hpp"

namespace lsgda {

double ProblemConstants::kappa() const {
  if (!(strong_convexity > 0.0)) {
    throw ConfigError("kappa requires mu > 0");
  }
  return smoothness / strong_convexity;
}

double ProblemConstants::envelope_smoothness() const {
  return smoothness + kappa() * smoothness;
}

void ProblemConstants::validate() const {
  if (!(smoothness > 0.0) || !std::isfinite(smoothness)) {
    throw ConfigError("constants: L must be positive");
  }
  if (!(strong_convexity >= 0.0) || !std::isfinite(strong_convexity)) {
    throw ConfigError("constants: mu must be >= 0");
  }
  if (strong_convexity > smoothness) {
    throw ConfigError("constants: mu must not exceed L (mu=" +
                      std::to_string(strong_convexity) +
                      ", L=" + std::to_string(smoothness) + ")");
  }
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
    throw ConfigError("constants: sigma^2 must be >= 0");
  }
}

void RunConfig::validate() const {
  if (n_workers < 1) throw ConfigError("run: n_workers must be >= 1");
  if (total_iters < 1) throw ConfigError("run: total_iters must be >= 1");
  if (sync_gap < 1 || sync_gap > total_iters) {
    throw ConfigError("run: sync_gap must satisfy 1 <= tau <= T (tau=" +
                      std::to_string(sync_gap) +
                      ", T=" + std::to_string(total_iters) + ")");
  }
  if (snapshot_gap < 1) throw ConfigError("run: snapshot_gap must be >= 1");
  if (batch_size < 1) throw ConfigError("run: batch_size must be >= 1");
  if (record_every < 0) throw ConfigError("run: record_every must be >= 0");
  primal_schedule.validate();
  dual_schedule.validate();
}

}  // namespace lsgda
