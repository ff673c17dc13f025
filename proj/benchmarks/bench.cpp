// Timing for the hot paths: guard cost, reassignment search, offline
// synthesis and a full run with repair and replanning.
#include <string>

#include <benchmark/benchmark.h>

#include "mvplan/reallocation.hpp"
#include "mvplan/runtime.hpp"

using namespace mvplan;

namespace {

Scenario load(const char* file) { return load_scenario_file(std::string(MVPLAN_SCENARIO_DIR) + "/" + file); }

void BM_GuardCost(benchmark::State& st) {
  Scenario sc = load("factory8.json");
  std::vector<SkillId> idle(sc.start.size(), kIdle);
  Symbol s = label(sc.start, idle, sc.world, sc.capabilities);
  for (auto _ : st)
    for (const auto& [e, g] : sc.nba.transitions()) benchmark::DoNotOptimize(edge_violation(s, g, sc.preds, sc.penalties));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(sc.nba.transitions().size()));
}
BENCHMARK(BM_GuardCost);

// One conjunct of n tasks; robot j can also do robot j-1's skill, and an
// idle robot takes the last one. Robot 1 loses its skill.
void BM_ReassignChain(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  auto skill_of = [&](int j) -> SkillId { return j == n - 1 ? 5 : 2 + j % 3; };
  CapabilityMatrix z(n + 1, 5);
  PredicateTable preds(1);
  std::vector<double> pen;
  Conjunct c;
  for (int j = 0; j < n; ++j) {
    z.grant(j, skill_of(j));
    if (j > 0) z.grant(j, skill_of(j - 1));
    c.push_back({LiteralKind::PositiveApply, preds.add_apply({"t" + std::to_string(j), skill_of(j), j, j}), j});
    pen.push_back(10);
  }
  z.grant(n, 5);
  z.revoke(0, skill_of(0));
  PenaltyMap f(pen);
  Teams team = teams(z);
  for (auto _ : st) {
    AssignmentContext ctx = build_context(c, preds, n + 1, 0, 0);
    benchmark::DoNotOptimize(bfs_reassign(ctx, preds, team, f));
  }
}
BENCHMARK(BM_ReassignChain)->Arg(10)->Arg(50)->Arg(250)->Arg(1000);

void BM_Synthesize(benchmark::State& st, const char* file) {
  Scenario sc = load(file);
  Nba nba = prune(sc.nba);
  PlanContext ctx{nba, sc.preds, sc.penalties, sc.world, sc.capabilities};
  for (auto _ : st) benchmark::DoNotOptimize(synthesize(ctx, sc.start));
}
BENCHMARK_CAPTURE(BM_Synthesize, trap_door, "trap_door.json")->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Synthesize, factory8, "factory8.json")->Unit(benchmark::kMillisecond);

void BM_Run(benchmark::State& st, const char* file) {
  Scenario sc = load(file);
  for (auto _ : st) benchmark::DoNotOptimize(run(sc));
}
BENCHMARK_CAPTURE(BM_Run, trap_door, "trap_door.json")->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Run, factory8, "factory8.json")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
