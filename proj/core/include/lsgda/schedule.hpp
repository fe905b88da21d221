#pragma once

#include <cstdint>
#include <variant>

namespace lsgda {

// Step-size schedules evaluated at the global iteration index t >= 0.

// eta_t = eta
struct ConstantStep {
  double eta;
};

// eta_t = 8 / (mu * (t + a)); requires mu > 0 and a >= 1.
struct InverseTimeStep {
  double mu;
  double a;
};

// eta_t = eta0 * (1 - rate)^floor(t / block); requires eta0 > 0,
// 0 <= rate < 1 and block >= 1. block > 1 steps the decay once per block of
// iterations, e.g. once per communication round when block equals the sync
// gap.
struct MultiplicativeDecayStep {
  double eta0;
  double rate;
  int64_t block = 1;
};

class StepSchedule {
 public:
  // Defaults to Constant(0); validate() rejects it, so a schedule must be
  // populated deliberately before use in a run.
  StepSchedule() : impl_(ConstantStep{0.0}) {}

  static StepSchedule constant(double eta);
  static StepSchedule inverse_time(double mu, double a);
  static StepSchedule multiplicative_decay(double eta0, double rate,
                                           int64_t block = 1);

  double eval(int64_t t) const;

  // Throws ConfigError unless the parameters satisfy the constraints above
  // and produce a strictly positive eta_0.
  void validate() const;

  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&impl_);
  }

 private:
  std::variant<ConstantStep, InverseTimeStep, MultiplicativeDecayStep> impl_;
};

}  // namespace lsgda
