#include "lsgda_cli/experiment.hpp"

#include <fstream>

#include "lsgda/dataset.hpp"
#include "lsgda/errors.hpp"
#include "lsgda/ncpl_toy.hpp"
#include "lsgda/ncsc_toy.hpp"
#include "lsgda/quadratic_saddle.hpp"
#include "lsgda/robust_linreg.hpp"
#include "lsgda/robust_mlp.hpp"

namespace lsgda::cli {

namespace {

const json& require(const json& obj, const char* key, const std::string& ctx) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw ConfigError("config: " + ctx + " is missing required key '" + key +
                      "'");
  }
  return *it;
}

StepSchedule parse_schedule(const json& obj, const std::string& ctx) {
  if (!obj.is_object()) throw ConfigError("config: " + ctx + " must be an object");
  const std::string kind = get_str(obj, "kind", ctx);
  if (kind == "constant") {
    check_keys(obj, {"kind", "eta"}, ctx);
    return StepSchedule::constant(get_num(obj, "eta", ctx));
  }
  if (kind == "inverse_time") {
    check_keys(obj, {"kind", "mu", "a"}, ctx);
    return StepSchedule::inverse_time(get_num(obj, "mu", ctx),
                                      get_num(obj, "a", ctx));
  }
  if (kind == "multiplicative_decay") {
    check_keys(obj, {"kind", "eta0", "rate"}, ctx);
    return StepSchedule::multiplicative_decay(get_num(obj, "eta0", ctx),
                                              get_num(obj, "rate", ctx));
  }
  throw ConfigError("config: " + ctx + " has unknown schedule kind '" + kind +
                    "' (expected constant, inverse_time, "
                    "multiplicative_decay)");
}

} // namespace

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& ctx) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) {
      if (key == a) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw ConfigError("config: " + ctx + " has unknown key '" + key + "'");
    }
  }
}

double get_num(const json& obj, const char* key, const std::string& ctx) {
  const json& v = require(obj, key, ctx);
  if (!v.is_number()) {
    throw ConfigError("config: " + ctx + "." + key + " must be a number");
  }
  return v.get<double>();
}

double get_num_or(const json& obj, const char* key, double fallback,
                  const std::string& ctx) {
  return obj.contains(key) ? get_num(obj, key, ctx) : fallback;
}

int64_t get_int(const json& obj, const char* key, const std::string& ctx) {
  const json& v = require(obj, key, ctx);
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    throw ConfigError("config: " + ctx + "." + key + " must be an integer");
  }
  return v.get<int64_t>();
}

int64_t get_int_or(const json& obj, const char* key, int64_t fallback,
                   const std::string& ctx) {
  return obj.contains(key) ? get_int(obj, key, ctx) : fallback;
}

std::string get_str(const json& obj, const char* key, const std::string& ctx) {
  const json& v = require(obj, key, ctx);
  if (!v.is_string()) {
    throw ConfigError("config: " + ctx + "." + key + " must be a string");
  }
  return v.get<std::string>();
}

bool get_bool_or(const json& obj, const char* key, bool fallback,
                 const std::string& ctx) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) {
    throw ConfigError("config: " + ctx + "." + key + " must be a boolean");
  }
  return it->get<bool>();
}

uint64_t get_seed_or(const json& obj, const char* key, uint64_t fallback,
                     const std::string& ctx) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_unsigned() && !it->is_number_integer()) {
    throw ConfigError("config: " + ctx + "." + key +
                      " must be a non-negative integer");
  }
  if (it->is_number_integer() && it->get<int64_t>() < 0) {
    throw ConfigError("config: " + ctx + "." + key + " must be >= 0");
  }
  return it->get<uint64_t>();
}

ExperimentConfig parse_experiment(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: document must be an object");
  check_keys(doc,
             {"problem", "algorithm", "run", "preset", "metrics",
              "output_name", "sweep"},
             "document");

  ExperimentConfig cfg;
  cfg.raw = doc;
  cfg.problem = require(doc, "problem", "document");
  if (!cfg.problem.is_object()) {
    throw ConfigError("config: problem must be an object");
  }
  cfg.algorithm = get_str(doc, "algorithm", "document");
  if (cfg.algorithm != "local_sgda" && cfg.algorithm != "local_sgda_plus") {
    throw ConfigError("config: algorithm must be local_sgda or "
                      "local_sgda_plus, got '" + cfg.algorithm + "'");
  }

  const json& run = require(doc, "run", "document");
  check_keys(run,
             {"n_workers", "total_iters", "sync_gap", "snapshot_gap",
              "primal_step", "dual_step", "batch_size", "master_seed",
              "record_every"},
             "run");
  cfg.run.n_workers = static_cast<int>(get_int(run, "n_workers", "run"));
  cfg.run.total_iters = get_int(run, "total_iters", "run");
  cfg.run.batch_size = static_cast<int>(get_int_or(run, "batch_size", 1, "run"));
  cfg.run.master_seed = get_seed_or(run, "master_seed", 0, "run");
  cfg.run.record_every = get_int_or(run, "record_every", 0, "run");

  cfg.has_preset = doc.contains("preset");
  const bool has_explicit = run.contains("sync_gap") ||
                            run.contains("snapshot_gap") ||
                            run.contains("primal_step") ||
                            run.contains("dual_step");
  if (cfg.has_preset && has_explicit) {
    throw ConfigError("config: preset and explicit gaps/schedules are "
                      "mutually exclusive");
  }
  if (cfg.has_preset) {
    const json& preset = doc.at("preset");
    check_keys(preset, {"regime", "ncpl_variant", "snapshot_tau_squared"},
               "preset");
    cfg.preset_regime = regime_from_string(get_str(preset, "regime", "preset"));
    if (preset.contains("ncpl_variant")) {
      cfg.preset_variant =
          ncpl_variant_from_string(get_str(preset, "ncpl_variant", "preset"));
    }
    cfg.preset_tau_squared =
        get_bool_or(preset, "snapshot_tau_squared", false, "preset");
  } else {
    cfg.run.sync_gap = get_int(run, "sync_gap", "run");
    cfg.run.snapshot_gap = get_int_or(run, "snapshot_gap", 1, "run");
    cfg.run.primal_schedule =
        parse_schedule(require(run, "primal_step", "run"), "run.primal_step");
    cfg.run.dual_schedule =
        parse_schedule(require(run, "dual_step", "run"), "run.dual_step");
    // Complete without a preset, so bounds can be enforced right here.
    // The preset path is validated when the preset is applied.
    cfg.run.validate();
  }

  if (doc.contains("metrics")) {
    const json& m = doc.at("metrics");
    check_keys(m,
               {"objective", "dist_to_saddle", "robust_loss", "envelope_grad",
                "heterogeneity", "robust_loss_inner_steps",
                "robust_loss_inner_lr"},
               "metrics");
    cfg.metrics.objective = get_bool_or(m, "objective", false, "metrics");
    cfg.metrics.dist_to_saddle =
        get_bool_or(m, "dist_to_saddle", false, "metrics");
    cfg.metrics.robust_loss = get_bool_or(m, "robust_loss", false, "metrics");
    cfg.metrics.envelope_grad =
        get_bool_or(m, "envelope_grad", false, "metrics");
    cfg.metrics.heterogeneity =
        get_bool_or(m, "heterogeneity", false, "metrics");
    cfg.metrics.robust_loss_inner_steps = static_cast<int>(
        get_int_or(m, "robust_loss_inner_steps", 100, "metrics"));
    cfg.metrics.robust_loss_inner_lr =
        get_num_or(m, "robust_loss_inner_lr", 0.01, "metrics");
  }

  if (doc.contains("output_name")) {
    cfg.output_name = get_str(doc, "output_name", "document");
    if (cfg.output_name.empty() ||
        cfg.output_name.find('/') != std::string::npos) {
      throw ConfigError("config: output_name must be a bare file stem");
    }
  }
  return cfg;
}

ExperimentConfig load_experiment(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config " + path);
  json doc;
  try {
    is >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config: " + path + " is not valid JSON: " + e.what());
  }
  return parse_experiment(doc);
}

BuiltProblem build_problem(const json& pb) {
  const std::string family = get_str(pb, "family", "problem");
  BuiltProblem out;

  if (family == "quadratic_saddle") {
    check_keys(pb,
               {"family", "n_nodes", "dim_x", "dim_y", "mu", "l_max",
                "coupling", "spread", "noise_std", "seed"},
               "problem");
    auto prob = std::make_unique<QuadraticSaddle>(QuadraticSaddle::random(
        static_cast<int>(get_int(pb, "n_nodes", "problem")),
        static_cast<int>(get_int(pb, "dim_x", "problem")),
        static_cast<int>(get_int(pb, "dim_y", "problem")),
        get_num_or(pb, "mu", 1.0, "problem"),
        get_num_or(pb, "l_max", 2.0, "problem"),
        get_num_or(pb, "coupling", 0.5, "problem"),
        get_num_or(pb, "spread", 0.0, "problem"),
        get_num_or(pb, "noise_std", 0.0, "problem"),
        get_seed_or(pb, "seed", 1, "problem")));
    out.x0.assign(static_cast<size_t>(prob->dim_x()), 0.0);
    out.y0.assign(static_cast<size_t>(prob->dim_y()), 0.0);
    out.problem = std::move(prob);
    return out;
  }

  if (family == "ncsc_toy") {
    check_keys(pb,
               {"family", "n_nodes", "dim_x", "dim_y", "mu_y", "c_lo", "c_hi",
                "shift_std", "b_std", "noise_std", "seed"},
               "problem");
    auto prob = std::make_unique<NcscToy>(NcscToy::random(
        static_cast<int>(get_int(pb, "n_nodes", "problem")),
        static_cast<int>(get_int(pb, "dim_x", "problem")),
        static_cast<int>(get_int(pb, "dim_y", "problem")),
        get_num_or(pb, "mu_y", 1.0, "problem"),
        get_num_or(pb, "c_lo", 0.5, "problem"),
        get_num_or(pb, "c_hi", 1.5, "problem"),
        get_num_or(pb, "shift_std", 0.3, "problem"),
        get_num_or(pb, "b_std", 0.4, "problem"),
        get_num_or(pb, "noise_std", 0.0, "problem"),
        get_seed_or(pb, "seed", 1, "problem")));
    out.x0.assign(static_cast<size_t>(prob->dim_x()), 0.0);
    out.y0.assign(static_cast<size_t>(prob->dim_y()), 0.0);
    out.problem = std::move(prob);
    return out;
  }

  if (family == "ncpl_toy") {
    check_keys(pb,
               {"family", "n_nodes", "dim_x", "dim_y", "dim_m", "rank", "c_lo",
                "c_hi", "shift_std", "r_spread", "noise_std", "seed"},
               "problem");
    const int dim_y = static_cast<int>(get_int(pb, "dim_y", "problem"));
    auto prob = std::make_unique<NcplToy>(NcplToy::random_bounded(
        static_cast<int>(get_int(pb, "n_nodes", "problem")),
        static_cast<int>(get_int(pb, "dim_x", "problem")), dim_y,
        static_cast<int>(get_int_or(pb, "dim_m", dim_y, "problem")),
        static_cast<int>(get_int_or(pb, "rank", std::max(1, dim_y - 1),
                                    "problem")),
        get_num_or(pb, "c_lo", 0.5, "problem"),
        get_num_or(pb, "c_hi", 1.5, "problem"),
        get_num_or(pb, "shift_std", 0.3, "problem"),
        get_num_or(pb, "r_spread", 0.2, "problem"),
        get_num_or(pb, "noise_std", 0.0, "problem"),
        get_seed_or(pb, "seed", 1, "problem")));
    out.x0.assign(static_cast<size_t>(prob->dim_x()), 0.0);
    out.y0.assign(static_cast<size_t>(prob->dim_y()), 0.0);
    out.problem = std::move(prob);
    return out;
  }

  if (family == "robust_linreg") {
    check_keys(pb,
               {"family", "dataset", "lambda_x", "dual_mode", "lambda_y",
                "ball_radius"},
               "problem");
    const FederatedDataset data =
        load_dataset(get_str(pb, "dataset", "problem"));
    RobustLinReg::Options opts;
    opts.lambda_x = get_num_or(pb, "lambda_x", 0.0, "problem");
    const std::string mode =
        pb.contains("dual_mode") ? get_str(pb, "dual_mode", "problem")
                                 : std::string("penalty");
    if (mode == "penalty") {
      opts.mode = RobustLinReg::DualMode::Penalty;
    } else if (mode == "ball") {
      opts.mode = RobustLinReg::DualMode::Ball;
    } else {
      throw ConfigError("config: problem.dual_mode must be penalty or ball");
    }
    opts.lambda_y = get_num_or(pb, "lambda_y", 1.0, "problem");
    opts.ball_radius = get_num_or(pb, "ball_radius", 1.0, "problem");
    auto prob = std::make_unique<RobustLinReg>(data, opts);
    out.robust = prob.get();
    out.x0.assign(static_cast<size_t>(prob->dim_x()), 0.0);
    out.y0.assign(static_cast<size_t>(prob->dim_y()), 0.0);
    out.problem = std::move(prob);
    return out;
  }

  if (family == "robust_mlp") {
    check_keys(pb,
               {"family", "dataset", "hidden1", "hidden2", "n_classes",
                "ball_radius", "init_seed"},
               "problem");
    const FederatedDataset data =
        load_dataset(get_str(pb, "dataset", "problem"));
    auto prob = std::make_unique<RobustMlp>(
        data, static_cast<int>(get_int_or(pb, "hidden1", 200, "problem")),
        static_cast<int>(get_int_or(pb, "hidden2", 200, "problem")),
        static_cast<int>(get_int(pb, "n_classes", "problem")),
        get_num_or(pb, "ball_radius", 1.0, "problem"));
    out.robust = prob.get();
    out.x0 = prob->init_weights(get_seed_or(pb, "init_seed", 0, "problem"));
    out.y0.assign(static_cast<size_t>(prob->dim_y()), 0.0);
    out.problem = std::move(prob);
    return out;
  }

  throw ConfigError("config: unknown problem family '" + family +
                    "' (expected quadratic_saddle, ncsc_toy, ncpl_toy, "
                    "robust_linreg, robust_mlp)");
}

} // namespace lsgda::cli
