// mvplan: validate, plan, simulate and repair mission scenarios.
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "mvplan/errors.hpp"
#include "mvplan/planner.hpp"
#include "mvplan/runtime.hpp"
#include "mvplan/scenario.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kInfeasible = 2;

bool write_file(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return true;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "cannot write " << path << "\n";
    return false;
  }
  return true;
}

int cmd_validate(const std::string& path) {
  mvplan::Scenario sc = mvplan::load_scenario_file(path);
  bool bad = false;
  for (const mvplan::Diagnostic& d : mvplan::validate(sc)) {
    bool err = d.level == mvplan::Diagnostic::Level::Error;
    bad |= err;
    std::cout << (err ? "error" : "warning") << " [" << d.check << "] " << d.message << "\n";
  }
  if (!bad) std::cout << sc.name << ": ok\n";
  return bad ? kFailed : kOk;
}

int cmd_plan(const std::string& path, const std::string& out) {
  mvplan::Scenario sc = mvplan::load_scenario_file(path);
  mvplan::Nba nba = mvplan::prune(sc.nba);
  mvplan::PlanContext ctx{nba, sc.preds, sc.penalties, sc.world, sc.capabilities};
  mvplan::HybridPlan plan;
  try {
    plan = mvplan::synthesize(ctx, sc.start);
  } catch (const mvplan::Infeasible& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  }
  if (!write_file(out, mvplan::to_jsonl(mvplan::trace_records(plan, sc, nba)))) return kFailed;
  std::cerr << "violation " << plan.violation << ", prefix " << plan.prefix.size() << ", suffix " << plan.suffix.size()
            << "\n";
  return kOk;
}

int run_and_write(const mvplan::Scenario& sc, const mvplan::RunOptions& opt, const std::string& out) {
  mvplan::RunResult r;
  try {
    r = mvplan::run(sc, opt);
  } catch (const mvplan::InfeasibleMission& e) {
    std::cerr << "infeasible mission: " << e.what() << "\n";
    return kInfeasible;
  }
  if (!write_file(out, mvplan::to_jsonl(r.events))) return kFailed;
  std::cerr << "mission violation " << r.violation << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum-violation replanning for multi-robot missions"};
  app.require_subcommand(1);

  std::string scenario, out;
  int cycles = 0, at = 0;
  std::string fail;

  auto* v = app.add_subcommand("validate", "Check a scenario");
  v->add_option("scenario", scenario)->required()->check(CLI::ExistingFile);

  auto* p = app.add_subcommand("plan", "Synthesize the offline plan");
  p->add_option("scenario", scenario)->required()->check(CLI::ExistingFile);
  p->add_option("--out", out, "Trace file ('-' for stdout)")->required();

  auto* s = app.add_subcommand("simulate", "Run the scenario's failure schedule");
  s->add_option("scenario", scenario)->required()->check(CLI::ExistingFile);
  s->add_option("--out", out, "Event log ('-' for stdout)")->required();
  s->add_option("--suffix-cycles", cycles, "Suffix repetitions to execute")->check(CLI::PositiveNumber);

  auto* r = app.add_subcommand("repair", "Inject one failure batch, ignoring the schedule");
  r->add_option("scenario", scenario)->required()->check(CLI::ExistingFile);
  r->add_option("--at", at, "Step of the failure")->required()->check(CLI::NonNegativeNumber);
  r->add_option("--fail", fail, "robot:skill,... (skill name, index or 'all')")->required();
  r->add_option("--out", out, "Event log ('-' for stdout)")->required();
  r->add_option("--suffix-cycles", cycles, "Suffix repetitions to execute")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kFailed;
  }

  try {
    if (*v) return cmd_validate(scenario);
    if (*p) return cmd_plan(scenario, out);
    mvplan::Scenario sc = mvplan::load_scenario_file(scenario);
    mvplan::RunOptions opt;
    opt.suffix_cycles = cycles;
    if (*r) {
      opt.use_schedule = false;
      opt.extra_failures.push_back({at, mvplan::parse_losses(fail, sc)});
    }
    return run_and_write(sc, opt, out);
  } catch (const mvplan::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
}
