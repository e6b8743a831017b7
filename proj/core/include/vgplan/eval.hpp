#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vgplan/dataset.hpp"
#include "vgplan/planner.hpp"

namespace vgplan {

// kOffGoal: the plan executes legally but does not end at the goal. It is
// kept apart from both GRR and BTR.
enum class Outcome { kGoalReached, kBadTransition, kNoPlanProposed, kOffGoal };
std::string to_string(Outcome o);
Outcome outcome_from_string(const std::string& s);

struct PlanOutcome {
  Outcome kind = Outcome::kNoPlanProposed;
  int bad_index = -1;  // 0-based index of the first illegal action

  bool operator==(const PlanOutcome&) const = default;
};

// Executes the plan in the simulator from instance.initial. A malformed
// action counts as an illegal action at its index.
PlanOutcome score_plan(const PlanningInstance& instance,
                       const std::optional<std::vector<std::string>>& plan);

struct InstanceRecord {
  int index = 0;
  PlanOutcome outcome;
  int attempts_used = 0;
  int successful_attempt = 0;
  int plan_length = -1;         // -1 when no plan
  int distinct_rollouts = -1;   // -1 when not probed

  bool operator==(const InstanceRecord&) const = default;
};

struct EvalReport {
  std::string method;
  int k = 0;
  double tau = 1.0;
  double top_p = 0.99;
  int max_plan_length = 0;
  std::uint64_t seed = 0;
  std::string generator_id;
  std::string verifier_id;
  std::vector<InstanceRecord> instances;

  std::size_t count(Outcome o) const;
  double grr() const;
  double btr() const;
  // Mean distinct rollouts per instance; nullopt when not probed.
  std::optional<double> mean_distinct_rollouts() const;

  bool operator==(const EvalReport&) const = default;
};

struct SweepResult {
  std::string axis;  // "k" or "tau"
  std::vector<double> values;
  std::vector<EvalReport> reports;

  bool operator==(const SweepResult&) const = default;
};

std::vector<PlanningInstance> to_planning_instances(const std::vector<TestInstance>& tests);

// A planning method: generator@k when gate is null, otherwise
// generator+gate@k.
struct Planner {
  std::string method;
  const Transformer<float>* generator = nullptr;
  const TransitionGate* gate = nullptr;
  std::string generator_id;
  std::string verifier_id;
};

// Scores every result; the report echoes the configuration.
EvalReport make_report(const Planner& planner, const InferenceConfig& config, std::uint64_t seed,
                       const std::vector<PlanningInstance>& instances,
                       const std::vector<PlanResult>& results);

EvalReport run_benchmark(const Planner& planner, const Vocabulary& vocab,
                         const std::vector<PlanningInstance>& instances,
                         const InferenceConfig& config, std::uint64_t seed, int workers = 1,
                         std::vector<PlanResult>* results = nullptr);

// The result a run with `k` attempts would have produced, derived from a
// run with at least k attempts. Exact because attempt streams are keyed by
// attempt number.
PlanResult truncate_attempts(const PlanResult& r, int k);

// One run at max(k_values); every smaller k is its prefix, so GRR is
// non-decreasing in k by construction. k_values must be strictly increasing.
SweepResult sweep_attempts(const Planner& planner, const Vocabulary& vocab,
                           const std::vector<PlanningInstance>& instances,
                           const std::vector<int>& k_values, const InferenceConfig& config,
                           std::uint64_t seed, int workers = 1);

struct DiversityProbe {
  int rollouts = 8;   // generator-only rollouts per instance
  int max_steps = 4;  // transitions per rollout
};

// Distinct action sequences among `probe.rollouts` generator-only rollouts
// of at most `probe.max_steps` transitions, per instance.
std::vector<int> distinct_rollouts(const Transformer<float>& generator, const Vocabulary& vocab,
                                   const std::vector<PlanningInstance>& instances,
                                   const SamplingParams& sampling, const DiversityProbe& probe,
                                   std::uint64_t seed, int workers = 1);

// One benchmark per temperature (strictly increasing, positive), each with
// the diversity probe attached.
SweepResult sweep_temperature(const Planner& planner, const Vocabulary& vocab,
                              const std::vector<PlanningInstance>& instances,
                              const std::vector<double>& taus, const InferenceConfig& config,
                              std::uint64_t seed, int workers = 1,
                              const DiversityProbe& probe = {});

enum class ReportFormat { kCsv, kStructured };

// CSV columns: method,k,tau,grr,btr followed by the remaining configuration
// and outcome counts. Throws IoError.
std::string csv_header();
std::string csv_row(const EvalReport& r);
void emit_report(const EvalReport& r, const std::filesystem::path& path, ReportFormat format);
void emit_report(const SweepResult& r, const std::filesystem::path& path, ReportFormat format);

EvalReport read_report(const std::filesystem::path& path);
SweepResult read_sweep(const std::filesystem::path& path);

}  // namespace vgplan
