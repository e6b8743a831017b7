#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vgplan/blocksworld.hpp"
#include "vgplan/rng.hpp"

namespace vgplan {

// states.size() == actions.size() + 1; states.back() doubles as the goal.
struct Trajectory {
  std::vector<State> states;
  std::vector<GroundedAction> actions;

  std::size_t length() const { return actions.size(); }
  const State& final_state() const { return states.back(); }
};

struct Transition {
  std::string goal_text;
  std::string state_text;
  std::string action_text;
  std::string next_state_text;

  bool operator==(const Transition&) const = default;
};

struct VerifierExample {
  std::string state_text;
  std::string action_text;
  bool valid = false;

  bool operator==(const VerifierExample&) const = default;
};

struct TestInstance {
  State initial;
  State goal;
  int source_length = 0;  // actions from initial to goal along the source trajectory

  bool operator==(const TestInstance& o) const {
    return initial == o.initial && goal == o.goal && source_length == o.source_length;
  }
};

// Random exploration without revisits: samples uniformly among applicable
// actions whose successor has not been visited, until max_len steps or no
// unvisited successor remains.
Trajectory explore_trajectory(const State& initial, int max_len, Rng& rng);

// Checks the Trajectory invariants; returns an empty string when they hold.
std::string trajectory_violation(const Trajectory& t);

// One transition per step, goal = canonical final state.
std::vector<Transition> build_generator_corpus(const std::vector<Trajectory>& trajectories);

// Replays one transition through the simulator.
bool transition_is_sound(const Transition& t);

enum class NegativeMode { kGlobal, kInstanceRestricted };

std::string to_string(NegativeMode m);
NegativeMode negative_mode_from_string(const std::string& s);

struct VerifierCorpusOptions {
  int negatives_per_positive = 1;
  NegativeMode mode = NegativeMode::kGlobal;
  // Drop candidate negatives that are actually applicable (ablation only).
  bool oracle_filter = false;
};

struct VerifierCorpus {
  std::vector<VerifierExample> examples;
  std::size_t negatives = 0;
  std::size_t false_negatives = 0;  // "invalid"-labeled but applicable

  double label_noise_rate() const {
    return negatives == 0 ? 0.0 : static_cast<double>(false_negatives) / static_cast<double>(negatives);
  }
};

// Weak labels: every positive transition yields (state, action, valid) and
// `negatives_per_positive` pairs (state, a', invalid) with a' drawn from the
// corpus's distinct action texts. Throws EmptyActionPool.
VerifierCorpus build_verifier_corpus(const std::vector<Transition>& transitions,
                                     const VerifierCorpusOptions& options, Rng& rng);

struct CorpusOptions {
  int num_states = 2000;
  int validation_states = 200;
  int min_blocks = 3;
  int max_blocks = 5;
  int max_len = 20;
};

struct Corpus {
  std::vector<Trajectory> train;
  std::vector<Trajectory> validation;
};

// Initial state i draws from an rng derived from (seed, i), so the result is
// independent of `workers`. Zero-length trajectories are dropped.
Corpus build_trajectory_corpus(const CorpusOptions& options, std::uint64_t seed, int workers = 1);

struct TestSetOptions {
  int count = 200;
  int max_len = 30;
  int min_blocks = 3;
  int max_blocks = 5;
  // false: goal index in (floor(L/2), L]; true: [floor(L/2), L] (with index
  // 0 excluded so goal != initial).
  bool inclusive_midpoint = false;
};

// Goal index for a length-L trajectory (states 0..L), drawn per the
// midpoint convention.
int sample_goal_index(int length, bool inclusive_midpoint, Rng& rng);

std::vector<TestInstance> build_test_set(const TestSetOptions& options, std::uint64_t seed,
                                         int workers = 1);

}  // namespace vgplan
