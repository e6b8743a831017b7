#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "vgplan/errors.hpp"
#include "vgplan/eval.hpp"
#include "vgplan/transcript.hpp"
#include "test_support.hpp"
#include "tiny_world.hpp"

using namespace vgplan;
using testing_support::TempDir;
using testing_support::tiny_world;

namespace {

PlanningInstance appendix_instance() {
  const auto plan = example_plan();
  return {parse_state(plan.front().state).state, parse_state(plan.front().goal).state};
}

std::vector<std::string> appendix_actions() {
  std::vector<std::string> out;
  for (const auto& e : example_plan()) out.push_back(e.action);
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(ScorePlan, Examples) {
  const PlanningInstance inst = appendix_instance();
  EXPECT_EQ(score_plan(inst, appendix_actions()).kind, Outcome::kGoalReached);
  EXPECT_EQ(score_plan(inst, std::nullopt).kind, Outcome::kNoPlanProposed);
  EXPECT_EQ(score_plan({inst.goal, inst.goal}, std::vector<std::string>{}).kind, Outcome::kGoalReached);

  const PlanningInstance table{parse_state("(arm-empty)\n(clear b1)\n(on-table b1)").state,
                               parse_state("(clear b1)\n(holding b1)").state};
  EXPECT_EQ(score_plan(table, std::vector<std::string>{"(putdown b1)"}), (PlanOutcome{Outcome::kBadTransition, 0}));
  // Legal but off goal.
  EXPECT_EQ(score_plan(table, std::vector<std::string>{"(pickup b1)", "(putdown b1)"}).kind, Outcome::kOffGoal);
  // Malformed text is an illegal action at its index.
  EXPECT_EQ(score_plan(table, std::vector<std::string>{"(pickup b1)", "(fly b1"}),
            (PlanOutcome{Outcome::kBadTransition, 1}));
  // Out-of-universe block.
  EXPECT_EQ(score_plan(table, std::vector<std::string>{"(pickup b7)"}), (PlanOutcome{Outcome::kBadTransition, 0}));
  // A prefix of the Appendix plan is legal but off goal; breaking step 12 gives BadTransition(11).
  auto actions = appendix_actions();
  actions.resize(20);
  EXPECT_EQ(score_plan(inst, actions).kind, Outcome::kOffGoal);
  actions = appendix_actions();
  actions[11] = "(putdown b4)";
  const PlanOutcome o = score_plan(inst, actions);
  EXPECT_EQ(o.kind, Outcome::kBadTransition);
  EXPECT_LE(o.bad_index, 11);
}

TEST(EvalReport, AggregatesAndBounds) {
  const auto& w = tiny_world();
  InferenceConfig c;
  c.k = 6;
  c.max_plan_length = 12;
  const Planner p{"gen@k", &w.generator, nullptr, "g", ""};
  const EvalReport r = run_benchmark(p, w.vocab, w.instances, c, 1);
  ASSERT_EQ(r.instances.size(), w.instances.size());
  std::size_t total = 0;
  for (Outcome o : {Outcome::kGoalReached, Outcome::kBadTransition, Outcome::kNoPlanProposed, Outcome::kOffGoal}) {
    total += r.count(o);
  }
  EXPECT_EQ(total, r.instances.size());
  EXPECT_GE(r.grr(), 0.0);
  EXPECT_LE(r.grr() + r.btr(), 1.0);
  EXPECT_DOUBLE_EQ(r.grr(), static_cast<double>(r.count(Outcome::kGoalReached)) / static_cast<double>(total));
  EXPECT_EQ(r.k, 6);
  EXPECT_EQ(r.max_plan_length, 12);
  EXPECT_EQ(run_benchmark(p, w.vocab, w.instances, c, 1, 4), r);

  const OracleGate oracle;
  const Planner po{"gen+oracle@k", &w.generator, &oracle, "g", "oracle"};
  EXPECT_EQ(run_benchmark(po, w.vocab, w.instances, c, 1).btr(), 0.0);
}

TEST(EvalReport, CsvAndStructuredRoundTrip) {
  TempDir dir;
  const auto& w = tiny_world();
  InferenceConfig c;
  c.k = 3;
  c.max_plan_length = 10;
  const Planner p{"gen@k", &w.generator, nullptr, "generator:abc", ""};
  const EvalReport r = run_benchmark(p, w.vocab, w.instances, c, 2);
  EXPECT_EQ(csv_header().rfind("method,k,tau,grr,btr,", 0), 0u);
  emit_report(r, dir / "r.csv", ReportFormat::kCsv);
  const auto rows = lines_of(testing_support::slurp(dir / "r.csv"));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], csv_header());
  EXPECT_EQ(rows[1], csv_row(r));
  emit_report(r, dir / "r.json", ReportFormat::kStructured);
  EXPECT_EQ(read_report(dir / "r.json"), r);
}

TEST(Sweeps, AttemptsNestedAndMonotone) {
  TempDir dir;
  const auto& w = tiny_world();
  InferenceConfig c;
  c.max_plan_length = 12;
  const Planner p{"gen@k", &w.generator, nullptr, "g", ""};
  const SweepResult s = sweep_attempts(p, w.vocab, w.instances, {1, 8, 16, 25}, c, 3);
  ASSERT_EQ(s.reports.size(), 4u);
  EXPECT_EQ(s.axis, "k");
  EXPECT_EQ(s.values, (std::vector<double>{1, 8, 16, 25}));
  for (std::size_t i = 1; i < s.reports.size(); ++i) EXPECT_GE(s.reports[i].grr(), s.reports[i - 1].grr());
  // The derived k=8 report equals a dedicated k=8 benchmark.
  c.k = 8;
  EXPECT_EQ(s.reports[1], run_benchmark(p, w.vocab, w.instances, c, 3));
  EXPECT_THROW(sweep_attempts(p, w.vocab, w.instances, {8, 1}, c, 3), ConfigError);
  EXPECT_THROW(sweep_attempts(p, w.vocab, w.instances, {0, 1}, c, 3), ConfigError);

  emit_report(s, dir / "s.csv", ReportFormat::kCsv);
  EXPECT_EQ(lines_of(testing_support::slurp(dir / "s.csv")).size(), 1 + s.values.size());
  emit_report(s, dir / "s.json", ReportFormat::kStructured);
  EXPECT_EQ(read_sweep(dir / "s.json"), s);
}

TEST(Sweeps, TemperatureWithDiversity) {
  const auto& w = tiny_world();
  InferenceConfig c;
  c.k = 2;
  c.max_plan_length = 8;
  const Planner p{"gen@k", &w.generator, nullptr, "g", ""};
  const SweepResult s = sweep_temperature(p, w.vocab, w.instances, {0.2, 1.1}, c, 4, 1, {6, 3});
  ASSERT_EQ(s.reports.size(), 2u);
  EXPECT_EQ(s.axis, "tau");
  EXPECT_DOUBLE_EQ(s.reports[0].tau, 0.2);
  for (const auto& r : s.reports) {
    ASSERT_TRUE(r.mean_distinct_rollouts().has_value());
    for (const auto& rec : r.instances) {
      EXPECT_GE(rec.distinct_rollouts, 1);
      EXPECT_LE(rec.distinct_rollouts, 6);
    }
  }
  EXPECT_LE(*s.reports[0].mean_distinct_rollouts(), *s.reports[1].mean_distinct_rollouts());
  EXPECT_THROW(sweep_temperature(p, w.vocab, w.instances, {0.0, 1.0}, c, 4), ConfigError);
}

TEST(Sweeps, DistinctRolloutsGreedyIsOne) {
  const auto& w = tiny_world();
  const auto d = distinct_rollouts(w.generator, w.vocab, w.instances, {1e-7, 0.99, 192}, {5, 3}, 1);
  for (int x : d) EXPECT_EQ(x, 1);
}
