#include "lsgda/schedule.hpp"

#include <cmath>
#include <string>

#include "lsgda/errors.hpp"

namespace lsgda {

StepSchedule StepSchedule::constant(double eta) {
  StepSchedule s;
  s.impl_ = ConstantStep{eta};
  s.validate();
  return s;
}

StepSchedule StepSchedule::inverse_time(double mu, double a) {
  StepSchedule s;
  s.impl_ = InverseTimeStep{mu, a};
  s.validate();
  return s;
}

StepSchedule StepSchedule::multiplicative_decay(double eta0, double rate,
                                                int64_t block) {
  StepSchedule s;
  s.impl_ = MultiplicativeDecayStep{eta0, rate, block};
  s.validate();
  return s;
}

double StepSchedule::eval(int64_t t) const {
  if (t < 0) throw ConfigError("StepSchedule::eval: t must be >= 0");
  if (const auto* c = std::get_if<ConstantStep>(&impl_)) {
    return c->eta;
  }
  if (const auto* v = std::get_if<InverseTimeStep>(&impl_)) {
    return 8.0 / (v->mu * (static_cast<double>(t) + v->a));
  }
  const auto& d = std::get<MultiplicativeDecayStep>(impl_);
  return d.eta0 * std::pow(1.0 - d.rate, static_cast<double>(t));
}

void StepSchedule::validate() const {
  if (const auto* c = std::get_if<ConstantStep>(&impl_)) {
    if (!(c->eta > 0.0) || !std::isfinite(c->eta)) {
      throw ConfigError("constant schedule: eta must be positive, got " +
                        std::to_string(c->eta));
    }
    return;
  }
  if (const auto* v = std::get_if<InverseTimeStep>(&impl_)) {
    if (!(v->mu > 0.0) || !std::isfinite(v->mu)) {
      throw ConfigError("inverse-time schedule: mu must be positive");
    }
    if (!(v->a >= 1.0) || !std::isfinite(v->a)) {
      throw ConfigError("inverse-time schedule: a must be >= 1");
    }
    return;
  }
  const auto& d = std::get<MultiplicativeDecayStep>(impl_);
  if (!(d.eta0 > 0.0) || !std::isfinite(d.eta0)) {
    throw ConfigError("multiplicative-decay schedule: eta0 must be positive");
  }
  if (!(d.rate >= 0.0) || !(d.rate < 1.0)) {
    throw ConfigError("multiplicative-decay schedule: rate must be in [0, 1)");
  }
}

}  // namespace lsgda
