#pragma once

#include <memory>
#include <optional>
#include <string>

#include "json.hpp"

#include "lsgda/config.hpp"
#include "lsgda/presets.hpp"
#include "lsgda/problem.hpp"
#include "lsgda/vec.hpp"

namespace lsgda::cli {

using nlohmann::json;

// Metric toggles plus the inner-ascent budget used when robust_loss is on.
// The budget is echoed into the summary JSON so runs stay comparable.
struct MetricsToggles {
  bool objective = false;
  bool dist_to_saddle = false;
  bool robust_loss = false;
  bool envelope_grad = false;
  bool heterogeneity = false;
  int robust_loss_inner_steps = 100;
  double robust_loss_inner_lr = 0.01;
};

// One experiment document. Exactly one of {explicit gaps + schedules,
// preset block} is populated; with a preset the gaps and schedules are
// filled in after the problem is built (the preset needs its constants).
struct ExperimentConfig {
  json problem;
  std::string algorithm = "local_sgda"; // or "local_sgda_plus"
  RunConfig run;
  bool has_preset = false;
  Regime preset_regime = Regime::ScScHeterogeneous;
  NcplVariant preset_variant = NcplVariant::LongSnapshot;
  bool preset_tau_squared = false;
  MetricsToggles metrics;
  std::string output_name = "run";
  json raw; // verbatim echo for the summary
};

ExperimentConfig parse_experiment(const json& doc);
ExperimentConfig load_experiment(const std::string& path);

// A constructed problem instance with its start point. `robust` is non-null
// when the family supports held-out adversarial evaluation.
struct BuiltProblem {
  std::unique_ptr<MinimaxProblem> problem;
  const RobustEvaluable* robust = nullptr;
  Vec64 x0;
  Vec64 y0;
};

// Builds the instance named by the config's problem block. Families:
// quadratic_saddle, ncsc_toy, ncpl_toy, robust_linreg, robust_mlp (the last
// two read a dataset file).
BuiltProblem build_problem(const json& problem_block);

// Shared strict-parsing helpers (unknown keys are errors).
void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& ctx);
double get_num(const json& obj, const char* key, const std::string& ctx);
double get_num_or(const json& obj, const char* key, double fallback,
                  const std::string& ctx);
int64_t get_int(const json& obj, const char* key, const std::string& ctx);
int64_t get_int_or(const json& obj, const char* key, int64_t fallback,
                   const std::string& ctx);
std::string get_str(const json& obj, const char* key, const std::string& ctx);
bool get_bool_or(const json& obj, const char* key, bool fallback,
                 const std::string& ctx);
uint64_t get_seed_or(const json& obj, const char* key, uint64_t fallback,
                     const std::string& ctx);

} // namespace lsgda::cli
