#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vgplan/blocksworld.hpp"
#include "vgplan/rng.hpp"
#include "vgplan/sampling.hpp"
#include "vgplan/transcript.hpp"
#include "vgplan/transformer.hpp"
#include "vgplan/vocabulary.hpp"

namespace vgplan {

struct InferenceConfig {
  int k = 25;                  // max attempts
  int max_plan_length = 40;    // L_max, transitions per attempt
  SamplingParams sampling;
  double threshold = 0.5;      // verifier acceptance threshold
  // Diagnostic: replace each generated next state by the simulator's, and
  // end the attempt when the action is inapplicable.
  bool oracle_states = false;
  int batch_slots = 32;        // concurrent rollouts per decoding batch

  void validate() const;  // throws ConfigError
};

// Generates (action, next state) for one prompt. Throws GenerationParseError
// and ContextOverflow.
struct GeneratedTransition {
  std::string action_text;
  std::string next_state_text;
};
GeneratedTransition generate_transition(const Transformer<float>& generator, const Vocabulary& vocab,
                                        const std::string& goal_text, const std::string& state_text,
                                        const SamplingParams& params, Rng& rng);

// One gate decision request. `true_state` is the simulator's state along the
// actions approved so far, when that is still defined.
struct GateQuery {
  const std::string* state_text = nullptr;
  const std::string* action_text = nullptr;
  const State* true_state = nullptr;
};

class TransitionGate {
 public:
  virtual ~TransitionGate() = default;
  virtual std::vector<char> approve(const std::vector<GateQuery>& queries) const = 0;
};

// Approves everything: the planner reduces to generator@k.
class PassThroughGate : public TransitionGate {
 public:
  std::vector<char> approve(const std::vector<GateQuery>& queries) const override;
};

// Learned verifier: approve iff P(valid) >= threshold, i.e. the head logit
// >= logit(threshold); threshold <= 0 always approves and >= 1 never does.
class LearnedGate : public TransitionGate {
 public:
  LearnedGate(const Transformer<float>& verifier, const Vocabulary& vocab, double threshold);
  std::vector<char> approve(const std::vector<GateQuery>& queries) const override;

 private:
  const Transformer<float>& verifier_;
  const Vocabulary& vocab_;
  double threshold_;
};

// Ground-truth applicability. Judged in the simulator's state when the
// query carries one, otherwise in the parsed state text.
class OracleGate : public TransitionGate {
 public:
  std::vector<char> approve(const std::vector<GateQuery>& queries) const override;
};

// Single-query convenience over any gate.
bool verifier_gate(const TransitionGate& gate, const std::string& state_text,
                   const std::string& action_text, const State* true_state = nullptr);

enum class Termination { kGoalMatched, kLengthExceeded, kVerifierRejected, kParseFailed, kInapplicable };
std::string to_string(Termination t);

struct AttemptStep {
  std::string state_text;  // prompt state
  std::string action_text;
  std::string next_state_text;
  bool approved = true;
};

struct PlanAttempt {
  std::vector<AttemptStep> steps;
  Termination termination = Termination::kParseFailed;
  std::string failure;  // parse error message, if any
};

struct PlanResult {
  std::optional<std::vector<std::string>> plan;  // proposed action texts
  int attempts_used = 0;
  int successful_attempt = 0;  // 1-based, 0 when no plan
  std::vector<PlanAttempt> attempts;
};

// Transcript of the successful attempt in the transition-block layout.
std::vector<TranscriptEntry> plan_transcript(const PlanningInstance& instance, const PlanResult& r);

struct RolloutOptions {
  // Stop an instance at its first goal-matched attempt (the planning loop).
  // When false every instance runs all k attempts (diversity probes).
  bool stop_at_goal = true;
  bool keep_attempts = true;
  StreamDomain domain = StreamDomain::kRollout;
  int workers = 1;
};

// Runs the planning loop on every instance. Attempt a of instance i samples
// from the stream (seed, domain, i, a), so an instance's result does not
// depend on the batch it shares, on `workers`, or on k beyond its own
// attempts. `gate` may be null (generator@k).
std::vector<PlanResult> plan_instances(const Transformer<float>& generator, const Vocabulary& vocab,
                                       const TransitionGate* gate,
                                       const std::vector<PlanningInstance>& instances,
                                       const InferenceConfig& config, std::uint64_t seed,
                                       const RolloutOptions& options = {});

// generator@k on one instance.
PlanResult plan_generator_at_k(const Transformer<float>& generator, const Vocabulary& vocab,
                               const PlanningInstance& instance, const InferenceConfig& config,
                               Rng& rng);

// generator+verifier@k on one instance; rejection restarts from the initial
// state and consumes an attempt.
PlanResult plan_generator_verifier_at_k(const Transformer<float>& generator,
                                        const TransitionGate& verifier, const Vocabulary& vocab,
                                        const PlanningInstance& instance,
                                        const InferenceConfig& config, Rng& rng);

}  // namespace vgplan
