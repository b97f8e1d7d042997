#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pgso/centrality.hpp"
#include "pgso/cost_model.hpp"
#include "pgso/ddl.hpp"
#include "pgso/graph_bench.hpp"
#include "pgso/ontology.hpp"
#include "pgso/optimizer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pgso;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitMismatch = 3;

struct RunConfig {
  std::string ontology_path;
  std::string stats_path;
  std::string workload_path;
  std::optional<std::int64_t> budget_bytes;
  std::optional<double> budget_frac;
  double theta1 = 0.66;
  double theta2 = 0.33;
  double epsilon = 0.1;
  std::string algorithm = "auto";
  std::optional<std::uint64_t> shuffle_seed;
  std::string out_dir = ".";
  std::string instances_path;
  std::string templates_path;
};

struct Inputs {
  Ontology ontology;
  OntologyStats stats;
  Workload workload;
};

// What one optimize run settles on: the exported schema plus the working
// schema behind it (bench materializes instances under the latter).
struct Optimized {
  PropertyGraphSchema schema;
  WorkingSchema working;
  std::string winner;  // nsc | cc | rc
  double benefit_ratio_vs_nsc = 1.0;
  ModelTotals totals;
  Warnings warnings;
  std::optional<std::int64_t> budget;
  json candidate_scores;  // auto only
};

int fail(int code, const std::string& what) {
  std::fprintf(stderr, "pgso: %s\n", what.c_str());
  return code;
}

int exit_code_for(const Error& e) {
  return e.code == ErrorCode::IoError ? kExitIo : kExitValidation;
}

int fail(const Error& e) {
  return fail(exit_code_for(e),
              std::string(to_string(e.code)) + ": " + e.message);
}

Result<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return Error{ErrorCode::IoError, "cannot read " + path};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Result<void> write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return Error{ErrorCode::IoError, "cannot write " + path.string()};
  out << text;
  out.close();
  if (!out) return Error{ErrorCode::IoError, "short write: " + path.string()};
  return {};
}

Result<Inputs> load_inputs(const RunConfig& cfg) {
  Inputs in;
  auto text = read_file(cfg.ontology_path);
  if (!text.ok()) return text.error();
  auto onto = parse_ontology(text.value());
  if (!onto.ok()) return onto.error();
  in.ontology = std::move(onto).value();

  if (!cfg.stats_path.empty()) {
    auto st = read_file(cfg.stats_path);
    if (!st.ok()) return st.error();
    auto parsed = parse_stats(st.value());
    if (!parsed.ok()) return parsed.error();
    in.stats = std::move(parsed).value();
  }
  if (!cfg.workload_path.empty()) {
    auto wl = read_file(cfg.workload_path);
    if (!wl.ok()) return wl.error();
    auto parsed = parse_workload(wl.value());
    if (!parsed.ok()) return parsed.error();
    in.workload = std::move(parsed).value();
  }
  return in;
}

Result<Optimized> run_pipeline(const RunConfig& cfg, const Inputs& in) {
  if (cfg.theta2 > cfg.theta1)
    return Error{ErrorCode::ThetaOrder,
                 "theta2 must not exceed theta1 (got " +
                     std::to_string(cfg.theta2) + " > " +
                     std::to_string(cfg.theta1) + ")"};

  Optimized result;
  result.totals = model_totals(in.ontology, in.stats, in.workload, cfg.theta1,
                               cfg.theta2);

  if (cfg.algorithm != "nsc") {
    if (cfg.budget_bytes)
      result.budget = *cfg.budget_bytes;
    else if (cfg.budget_frac)
      result.budget = static_cast<std::int64_t>(
          std::llround(*cfg.budget_frac *
                       static_cast<double>(result.totals.cost_bytes)));
    else
      return Error{ErrorCode::ConstraintViolation,
                   "--budget-bytes or --budget-frac is required for "
                   "algorithm '" +
                       cfg.algorithm + "'"};
    if (*result.budget < 0)
      return Error{ErrorCode::ConstraintViolation, "budget must be >= 0"};
  }

  OptimizeOptions nsc_opts{cfg.theta1, cfg.theta2, cfg.shuffle_seed};
  auto nsc = optimize_unconstrained(in.ontology, nsc_opts);
  if (!nsc.ok()) return nsc.error();
  PropertyGraphSchema nsc_pgs = generate_pgs(nsc.value());
  nsc_pgs.budget_report.benefit_score = result.totals.benefit;
  nsc_pgs.budget_report.cost_bytes = result.totals.cost_bytes;

  auto run_rc = [&](Warnings* w, WorkingSchema* ws) {
    return optimize_relation_centric(in.ontology, *result.budget, cfg.theta1,
                                     cfg.theta2, cfg.epsilon, in.workload,
                                     in.stats, w, ws);
  };
  auto run_cc = [&](Warnings* w, WorkingSchema* ws) {
    return optimize_concept_centric(in.ontology, *result.budget, cfg.theta1,
                                    cfg.theta2, in.workload, in.stats, w, ws);
  };

  if (cfg.algorithm == "nsc") {
    result.schema = std::move(nsc_pgs);
    result.working = std::move(nsc).value();
    result.winner = "nsc";
    result.benefit_ratio_vs_nsc = 1.0;
    return result;
  }
  if (cfg.algorithm == "rc" || cfg.algorithm == "cc") {
    WorkingSchema ws;
    auto got = cfg.algorithm == "rc" ? run_rc(&result.warnings, &ws)
                                     : run_cc(&result.warnings, &ws);
    if (!got.ok()) return got.error();
    result.schema = std::move(got).value();
    result.working = std::move(ws);
    result.winner = cfg.algorithm;
  } else if (cfg.algorithm == "auto") {
    Warnings warn_rc, warn_cc;
    WorkingSchema ws_rc, ws_cc;
    auto rc = run_rc(&warn_rc, &ws_rc);
    if (!rc.ok()) return rc.error();
    auto cc = run_cc(&warn_cc, &ws_cc);
    if (!cc.ok()) return cc.error();
    double score_rc = rc.value().budget_report.benefit_score;
    double score_cc = cc.value().budget_report.benefit_score;
    result.candidate_scores = {{"rc", score_rc}, {"cc", score_cc}};
    if (score_cc > score_rc) {
      result.schema = std::move(cc).value();
      result.working = std::move(ws_cc);
      result.warnings = std::move(warn_cc);
      result.winner = "cc";
    } else {
      result.schema = std::move(rc).value();
      result.working = std::move(ws_rc);
      result.warnings = std::move(warn_rc);
      result.winner = "rc";
    }
  } else {
    return Error{ErrorCode::ConstraintViolation,
                 "unknown algorithm '" + cfg.algorithm + "'"};
  }

  auto br = benefit_ratio(result.schema, nsc_pgs);
  if (!br.ok()) return br.error();
  result.benefit_ratio_vs_nsc = br.value();
  return result;
}

json report_json(const RunConfig& cfg, const Optimized& opt) {
  json report;
  report["algorithm"] = cfg.algorithm;
  report["winner"] = opt.winner;
  report["benefitScore"] = opt.schema.budget_report.benefit_score;
  report["costBytes"] = opt.schema.budget_report.cost_bytes;
  report["benefitRatioVsNsc"] = opt.benefit_ratio_vs_nsc;
  report["nscBenefitScore"] = opt.totals.benefit;
  report["nscCostBytes"] = opt.totals.cost_bytes;
  if (opt.budget) report["budgetBytes"] = *opt.budget;
  if (!opt.candidate_scores.is_null())
    report["candidateScores"] = opt.candidate_scores;
  report["appliedRules"] = opt.schema.budget_report.applied_rules;
  report["warnings"] = opt.warnings;
  return report;
}

int cmd_optimize(const RunConfig& cfg) {
  auto inputs = load_inputs(cfg);
  if (!inputs.ok()) return fail(inputs.error());
  auto opt = run_pipeline(cfg, inputs.value());
  if (!opt.ok()) return fail(opt.error());

  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) return fail(kExitIo, "cannot create " + cfg.out_dir);

  fs::path out(cfg.out_dir);
  auto w1 = write_file(out / "schema.json", serialize_pgs(opt.value().schema));
  auto w2 = write_file(out / "schema.ddl", emit_ddl(opt.value().schema));
  auto w3 =
      write_file(out / "report.json", report_json(cfg, opt.value()).dump(2) + "\n");
  for (const auto* w : {&w1, &w2, &w3})
    if (!w->ok()) return fail(w->error());

  log(LogLevel::Info,
      "optimize: winner=" + opt.value().winner + " benefit=" +
          std::to_string(opt.value().schema.budget_report.benefit_score));
  std::printf("%s benefit=%.6g cost=%lld BR=%.6g -> %s\n",
              opt.value().winner.c_str(),
              opt.value().schema.budget_report.benefit_score,
              static_cast<long long>(opt.value().schema.budget_report.cost_bytes),
              opt.value().benefit_ratio_vs_nsc, cfg.out_dir.c_str());
  return kExitOk;
}

int cmd_bench(const RunConfig& cfg) {
  auto inputs = load_inputs(cfg);
  if (!inputs.ok()) return fail(inputs.error());
  auto opt = run_pipeline(cfg, inputs.value());
  if (!opt.ok()) return fail(opt.error());

  auto data_text = read_file(cfg.instances_path);
  if (!data_text.ok()) return fail(data_text.error());
  auto data = parse_instances(data_text.value());
  if (!data.ok()) return fail(data.error());
  auto valid = validate_instances(data.value(), inputs.value().ontology);
  if (!valid.ok()) return fail(valid.error());

  auto tmpl_text = read_file(cfg.templates_path);
  if (!tmpl_text.ok()) return fail(tmpl_text.error());
  auto templates = parse_templates(tmpl_text.value());
  if (!templates.ok()) return fail(templates.error());

  auto baseline = WorkingSchema::from_ontology(inputs.value().ontology);
  if (!baseline.ok()) return fail(baseline.error());
  auto dir_graph = load_instances(data.value(), baseline.value());
  if (!dir_graph.ok()) return fail(dir_graph.error());
  auto opt_graph = load_instances(data.value(), opt.value().working);
  if (!opt_graph.ok()) return fail(opt_graph.error());

  auto report =
      compare(dir_graph.value(), opt_graph.value(), templates.value());
  if (!report.ok()) return fail(report.error());

  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) return fail(kExitIo, "cannot create " + cfg.out_dir);
  fs::path out(cfg.out_dir);
  auto w1 = write_file(out / "bench.csv", report.value().to_csv());
  auto w2 = write_file(out / "bench_summary.txt", report.value().to_table());
  for (const auto* w : {&w1, &w2})
    if (!w->ok()) return fail(w->error());

  std::printf("%s", report.value().to_table().c_str());
  if (report.value().any_mismatch)
    return fail(kExitMismatch,
                std::string(to_string(ErrorCode::AnswerMismatch)) +
                    ": optimized answers diverge from the baseline");
  return kExitOk;
}

void add_common_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--ontology", cfg.ontology_path, "ontology JSON")
      ->required();
  cmd->add_option("--stats", cfg.stats_path, "cardinality/byte statistics");
  cmd->add_option("--workload", cfg.workload_path, "access frequencies");
  auto* bytes = cmd->add_option("--budget-bytes", cfg.budget_bytes,
                                "storage budget in bytes");
  cmd->add_option("--budget-frac", cfg.budget_frac,
                  "budget as a fraction of the unconstrained schema's cost")
      ->excludes(bytes);
  cmd->add_option("--theta1", cfg.theta1, "fold threshold")
      ->capture_default_str();
  cmd->add_option("--theta2", cfg.theta2, "copy-down threshold")
      ->capture_default_str();
  cmd->add_option("--epsilon", cfg.epsilon, "knapsack approximation bound")
      ->capture_default_str();
  cmd->add_option("--algorithm", cfg.algorithm, "nsc | cc | rc | auto")
      ->capture_default_str()
      ->check(CLI::IsMember({"nsc", "cc", "rc", "auto"}));
  cmd->add_option("--shuffle-seed", cfg.shuffle_seed,
                  "permute rule scan order (result is order-independent)");
  cmd->add_option("--out", cfg.out_dir, "output directory")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ontology-to-property-graph schema optimizer"};
  app.require_subcommand(1);

  RunConfig cfg;
  CLI::App* optimize =
      app.add_subcommand("optimize", "derive a schema and emit artifacts");
  add_common_flags(optimize, cfg);

  CLI::App* bench = app.add_subcommand(
      "bench", "compare query work on baseline vs optimized graphs");
  add_common_flags(bench, cfg);
  bench->add_option("--instances", cfg.instances_path, "instance data JSON")
      ->required();
  bench->add_option("--templates", cfg.templates_path, "query templates JSON")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  if (optimize->parsed()) return cmd_optimize(cfg);
  return cmd_bench(cfg);
}
