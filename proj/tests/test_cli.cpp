#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "lsgda_cli/commands.hpp"
#include "lsgda_cli/csv.hpp"
#include "lsgda_cli/experiment.hpp"

#include "lsgda/dataset.hpp"
#include "lsgda/errors.hpp"
#include "lsgda/synthetic.hpp"

using namespace lsgda;
using namespace lsgda::cli;
namespace fs = std::filesystem;

namespace {

fs::path make_scratch(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("lsgda_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

void spit(const fs::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  REQUIRE(out.good());
  out << body;
}

json explicit_doc() {
  return json{
      {"problem",
       {{"family", "quadratic_saddle"},
        {"n_nodes", 2},
        {"dim_x", 2},
        {"dim_y", 2},
        {"noise_std", 0.1},
        {"seed", 5}}},
      {"algorithm", "local_sgda"},
      {"run",
       {{"n_workers", 2},
        {"total_iters", 20},
        {"sync_gap", 4},
        {"primal_step", {{"kind", "constant"}, {"eta", 0.01}}},
        {"dual_step", {{"kind", "constant"}, {"eta", 0.02}}},
        {"master_seed", 3}}},
      {"metrics", {{"objective", true}}},
      {"output_name", "smoke"}};
}

} // namespace

TEST_CASE("experiment parsing maps the document onto a validated config") {
  const ExperimentConfig cfg = parse_experiment(explicit_doc());
  CHECK(cfg.algorithm == "local_sgda");
  CHECK(cfg.run.n_workers == 2);
  CHECK(cfg.run.total_iters == 20);
  CHECK(cfg.run.sync_gap == 4);
  CHECK(cfg.run.batch_size == 1);       // default
  CHECK(cfg.run.master_seed == 3);
  CHECK(cfg.run.record_every == 0);     // default
  CHECK(cfg.run.primal_schedule.eval(0) == 0.01);
  CHECK_FALSE(cfg.has_preset);
  CHECK(cfg.metrics.objective);
  CHECK_FALSE(cfg.metrics.dist_to_saddle);
  CHECK(cfg.metrics.robust_loss_inner_steps == 100);
  CHECK(cfg.metrics.robust_loss_inner_lr == 0.01);
  CHECK(cfg.output_name == "smoke");
  CHECK(cfg.raw == explicit_doc());
}

TEST_CASE("experiment parsing accepts a preset block") {
  json doc = explicit_doc();
  doc["run"].erase("sync_gap");
  doc["run"].erase("primal_step");
  doc["run"].erase("dual_step");
  doc["preset"] = {{"regime", "ncpl"},
                   {"ncpl_variant", "equal_gaps"},
                   {"snapshot_tau_squared", true}};
  doc["algorithm"] = "local_sgda_plus";
  const ExperimentConfig cfg = parse_experiment(doc);
  CHECK(cfg.has_preset);
  CHECK(cfg.preset_regime == Regime::NcPl);
  CHECK(cfg.preset_variant == NcplVariant::EqualGaps);
  CHECK(cfg.preset_tau_squared);
  CHECK(cfg.algorithm == "local_sgda_plus");
}

TEST_CASE("experiment parsing rejects malformed documents") {
  {
    json doc = explicit_doc();
    doc["surprise"] = 1;
    CHECK_THROWS_AS(parse_experiment(doc), ConfigError);
  }
  {
    json doc = explicit_doc();
    doc["preset"] = {{"regime", "ncsc"}}; // preset and explicit schedules
    CHECK_THROWS_AS(parse_experiment(doc), ConfigError);
  }
  {
    json doc = explicit_doc();
    doc["run"].erase("primal_step"); // neither complete nor preset
    CHECK_THROWS_AS(parse_experiment(doc), ConfigError);
  }
  {
    json doc = explicit_doc();
    doc["algorithm"] = "gradient_descent";
    CHECK_THROWS_AS(parse_experiment(doc), ConfigError);
  }
  {
    json doc = explicit_doc();
    doc["run"]["primal_step"] = {{"kind", "cosine"}, {"eta", 0.1}};
    CHECK_THROWS_AS(parse_experiment(doc), ConfigError);
  }
  {
    json doc = explicit_doc();
    doc["output_name"] = "sub/dir";
    CHECK_THROWS_AS(parse_experiment(doc), ConfigError);
  }
  {
    json doc = explicit_doc();
    doc["run"]["master_seed"] = -4;
    CHECK_THROWS_AS(parse_experiment(doc), ConfigError);
  }
  {
    json doc = explicit_doc();
    doc["run"]["total_iters"] = 0; // run config bounds still apply
    CHECK_THROWS_AS(parse_experiment(doc), ConfigError);
  }
}

TEST_CASE("trace rendering is exact and stable") {
  TraceRecord a;
  a.iter = 0;
  a.comm_round = 0;
  a.deviation_x = 0.0;
  a.deviation_y = 0.0;
  a.objective = 1.0 / 3.0;
  TraceRecord b;
  b.iter = 7;
  b.comm_round = 1;
  b.deviation_x = 0.1;
  b.deviation_y = 2.5e-17;
  b.objective = -3.25;
  TraceColumns cols;
  cols.objective = true;

  const std::string body = render_trace_csv({a, b}, cols);
  CHECK(body == render_trace_csv({a, b}, cols));
  CHECK(body.find("iter,comm_round,deviation_x,deviation_y,objective\n") !=
        std::string::npos);
  CHECK(body.rfind("# trace-schema", 0) == 0);

  // every float survives a parse round trip at 17 significant digits
  for (const double v : {0.1, 1.0 / 3.0, 2.5e-17, -1e300, 3.141592653589793,
                         5e-324, 0.0}) {
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }

  // a row missing an enabled metric is a bug upstream, not a blank cell
  TraceRecord c;
  c.iter = 9;
  CHECK_THROWS_AS(render_trace_csv({c}, cols), IoError);
}

TEST_CASE("problem building validates the family name and wires datasets") {
  json bad = {{"family", "lstm"}};
  CHECK_THROWS_AS(build_problem(bad), ConfigError);

  const BuiltProblem quad = build_problem(explicit_doc()["problem"]);
  CHECK(quad.problem->n_nodes() == 2);
  CHECK(quad.robust == nullptr);
  CHECK(quad.x0 == Vec64(2, 0.0));
  CHECK(quad.y0 == Vec64(2, 0.0));

  const fs::path dir = make_scratch("build");
  SyntheticSpec spec;
  spec.kind = TaskKind::Regression;
  spec.n_nodes = 2;
  spec.dim = 3;
  spec.min_count = 10;
  spec.max_count = 12;
  spec.seed = 9;
  save_dataset(generate_synthetic(spec), (dir / "data.fds").string());

  json reg = {{"family", "robust_linreg"},
              {"dataset", (dir / "data.fds").string()},
              {"dual_mode", "ball"},
              {"ball_radius", 0.5}};
  const BuiltProblem built = build_problem(reg);
  CHECK(built.robust != nullptr);
  CHECK(built.problem->has_dual_constraint());

  SyntheticSpec cls = spec;
  cls.kind = TaskKind::Classification;
  cls.n_classes = 3;
  save_dataset(generate_synthetic(cls), (dir / "cls.fds").string());
  json mlp = {{"family", "robust_mlp"},
              {"dataset", (dir / "cls.fds").string()},
              {"hidden1", 4},
              {"hidden2", 4},
              {"n_classes", 3},
              {"init_seed", 11}};
  const BuiltProblem net = build_problem(mlp);
  CHECK(net.robust != nullptr);
  CHECK(squared_norm(net.x0) > 0.0); // seeded warm start
  fs::remove_all(dir);
}

TEST_CASE("generate-data command writes reproducible datasets") {
  const fs::path dir = make_scratch("gen");
  const json doc = {{"kind", "synthetic"}, {"task", "regression"},
                    {"n_nodes", 3},        {"dim", 4},
                    {"min_count", 8},      {"max_count", 10},
                    {"seed", 21},          {"output", "data.fds"}};
  spit(dir / "gen.json", doc.dump(2));

  CommonFlags flags;
  flags.config_path = (dir / "gen.json").string();
  flags.output_dir = dir.string();
  flags.quiet = true;
  REQUIRE(cmd_generate_data(flags) == 0);
  const std::string first = slurp(dir / "data.fds");
  REQUIRE(cmd_generate_data(flags) == 0);
  CHECK(slurp(dir / "data.fds") == first);

  flags.seed_override = 22;
  REQUIRE(cmd_generate_data(flags) == 0);
  CHECK(slurp(dir / "data.fds") != first);
  fs::remove_all(dir);
}

TEST_CASE("run command writes byte-stable traces in both thread modes") {
  const fs::path dir = make_scratch("run");
  spit(dir / "exp.json", explicit_doc().dump(2));

  CommonFlags flags;
  flags.config_path = (dir / "exp.json").string();
  flags.output_dir = dir.string();
  flags.quiet = true;
  REQUIRE(cmd_run(flags, false) == 0);
  const std::string csv1 = slurp(dir / "smoke.csv");
  const json summary1 = json::parse(slurp(dir / "smoke.json"));

  REQUIRE(cmd_run(flags, false) == 0);
  CHECK(slurp(dir / "smoke.csv") == csv1);
  REQUIRE(cmd_run(flags, true) == 0);
  CHECK(slurp(dir / "smoke.csv") == csv1);

  CHECK(summary1.at("algorithm") == "local_sgda");
  CHECK(summary1.at("n_workers") == 2);
  CHECK(summary1.at("total_iters") == 20);
  CHECK(summary1.at("master_seed_used") == 3);
  CHECK(summary1.at("communication_rounds") == 5);
  CHECK(summary1.at("total_local_steps") == 40);
  CHECK(summary1.at("resolved").at("sync_gap") == 4);
  CHECK(summary1.at("final").contains("objective"));
  CHECK(summary1.at("final").contains("deviation_x"));
  CHECK(summary1.at("config") == explicit_doc());

  // seed override changes the trajectory and is echoed
  flags.seed_override = 77;
  REQUIRE(cmd_run(flags, false) == 0);
  CHECK(slurp(dir / "smoke.csv") != csv1);
  CHECK(json::parse(slurp(dir / "smoke.json")).at("master_seed_used") == 77);
  fs::remove_all(dir);
}

TEST_CASE("metric toggles that need missing oracles fail the run") {
  const fs::path dir = make_scratch("toggles");
  json doc = explicit_doc();
  doc["metrics"] = {{"robust_loss", true}}; // no held-out data on this family
  spit(dir / "exp.json", doc.dump(2));
  CommonFlags flags;
  flags.config_path = (dir / "exp.json").string();
  flags.output_dir = dir.string();
  flags.quiet = true;
  CHECK_THROWS_AS(cmd_run(flags, false), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("tau sweep emits per-gap traces and a comparison table") {
  const fs::path dir = make_scratch("sweep");
  json doc = explicit_doc();
  doc["metrics"] = {{"objective", true}, {"dist_to_saddle", true}};
  doc["sweep"] = {{"taus", {1, 5}},
                  {"target_loss", 1e-9}, // unreachable in 20 iterations
                  {"metric", "dist_to_saddle"}};
  spit(dir / "exp.json", doc.dump(2));

  CommonFlags flags;
  flags.config_path = (dir / "exp.json").string();
  flags.output_dir = dir.string();
  flags.quiet = true;
  REQUIRE(cmd_sweep_tau(flags) == 0);

  CHECK(fs::exists(dir / "smoke_tau1.csv"));
  CHECK(fs::exists(dir / "smoke_tau5.csv"));
  const std::string table = slurp(dir / "smoke_sweep.csv");
  CHECK(table.find("tau,rounds_to_target,final_metric") != std::string::npos);
  CHECK(table.find("\n1,-1,") != std::string::npos); // target never reached
  CHECK(table.find("\n5,-1,") != std::string::npos);

  // rerun is byte-identical
  const std::string t1 = slurp(dir / "smoke_tau1.csv");
  REQUIRE(cmd_sweep_tau(flags) == 0);
  CHECK(slurp(dir / "smoke_tau1.csv") == t1);
  CHECK(slurp(dir / "smoke_sweep.csv") == table);

  // a preset cannot pin sync_gap when the sweep is varying it
  json bad = doc;
  bad["run"].erase("sync_gap");
  bad["run"].erase("primal_step");
  bad["run"].erase("dual_step");
  bad["preset"] = {{"regime", "scsc_hetero"}};
  spit(dir / "bad.json", bad.dump(2));
  flags.config_path = (dir / "bad.json").string();
  CHECK_THROWS_AS(cmd_sweep_tau(flags), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("gradient self-check command passes on the built-in families") {
  CHECK(cmd_check_gradients(true) == 0);
}
