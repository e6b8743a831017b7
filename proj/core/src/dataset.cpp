#include "vgplan/dataset.hpp"

#include <algorithm>
#include <unordered_set>

#include "vgplan/errors.hpp"
#include "vgplan/parallel.hpp"

namespace vgplan {

Trajectory explore_trajectory(const State& initial, int max_len, Rng& rng) {
  Trajectory t;
  t.states.push_back(initial);
  std::unordered_set<std::string> visited{serialize_state(initial)};
  while (static_cast<int>(t.length()) < max_len) {
    const State& cur = t.states.back();
    std::vector<GroundedAction> options;
    std::vector<State> successors;
    std::vector<std::string> texts;
    for (const auto& a : applicable_actions(cur)) {
      State next = apply(cur, a);
      std::string text = serialize_state(next);
      if (visited.count(text)) continue;
      options.push_back(a);
      successors.push_back(std::move(next));
      texts.push_back(std::move(text));
    }
    if (options.empty()) break;
    const auto pick = static_cast<std::size_t>(rng.uniform_below(options.size()));
    visited.insert(texts[pick]);
    t.actions.push_back(options[pick]);
    t.states.push_back(std::move(successors[pick]));
  }
  return t;
}

std::string trajectory_violation(const Trajectory& t) {
  if (t.states.size() != t.actions.size() + 1) return "states/actions size mismatch";
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < t.states.size(); ++i) {
    if (!seen.insert(serialize_state(t.states[i])).second) {
      return "state " + std::to_string(i) + " repeats an earlier state";
    }
    if (i == t.actions.size()) break;
    if (!is_applicable(t.states[i], t.actions[i])) {
      return "action " + std::to_string(i) + " is not applicable";
    }
    if (!(apply(t.states[i], t.actions[i]) == t.states[i + 1])) {
      return "action " + std::to_string(i) + " does not lead to the next state";
    }
  }
  return {};
}

std::vector<Transition> build_generator_corpus(const std::vector<Trajectory>& trajectories) {
  std::vector<Transition> out;
  for (const auto& t : trajectories) {
    const std::string goal = serialize_state(t.final_state());
    std::string state = serialize_state(t.states.front());
    for (std::size_t i = 0; i < t.length(); ++i) {
      std::string next = serialize_state(t.states[i + 1]);
      out.push_back({goal, state, serialize_action(t.actions[i]), next});
      state = std::move(next);
    }
  }
  return out;
}

bool transition_is_sound(const Transition& t) {
  try {
    const auto s = parse_state(t.state_text);
    const auto a = parse_action(t.action_text);
    if (!s.consistent || serialize_state(s.state) != t.state_text) return false;
    if (serialize_action(a) != t.action_text || !is_applicable(s.state, a)) return false;
    return serialize_state(apply(s.state, a)) == t.next_state_text;
  } catch (const Error&) {
    return false;
  }
}

std::string to_string(NegativeMode m) {
  return m == NegativeMode::kGlobal ? "global" : "instance-restricted";
}

NegativeMode negative_mode_from_string(const std::string& s) {
  if (s == "global") return NegativeMode::kGlobal;
  if (s == "instance-restricted" || s == "restricted") return NegativeMode::kInstanceRestricted;
  throw ConfigError("unknown negatives mode '" + s + "'");
}

VerifierCorpus build_verifier_corpus(const std::vector<Transition>& transitions,
                                     const VerifierCorpusOptions& options, Rng& rng) {
  if (transitions.empty()) throw EmptyActionPool("no transitions to build a verifier corpus from");
  std::vector<std::string> pool_text;
  for (const auto& t : transitions) pool_text.push_back(t.action_text);
  std::sort(pool_text.begin(), pool_text.end());
  pool_text.erase(std::unique(pool_text.begin(), pool_text.end()), pool_text.end());
  std::vector<GroundedAction> pool;
  pool.reserve(pool_text.size());
  for (const auto& a : pool_text) pool.push_back(parse_action(a));

  VerifierCorpus corpus;
  corpus.examples.reserve(transitions.size() * (1 + options.negatives_per_positive));
  std::vector<std::size_t> eligible;
  for (const auto& t : transitions) {
    const State state = parse_state(t.state_text).state;
    eligible.clear();
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (pool_text[i] == t.action_text) continue;
      if (options.mode == NegativeMode::kInstanceRestricted) {
        bool inside = true;
        for (int j = 0; j < param_count(pool[i].kind); ++j) inside &= state.in_universe(pool[i].args[j]);
        if (!inside) continue;
      }
      if (options.oracle_filter && is_applicable(state, pool[i])) continue;
      eligible.push_back(i);
    }
    if (options.negatives_per_positive > 0 && eligible.empty()) {
      throw EmptyActionPool("no eligible negative action for state:\n" + t.state_text);
    }
    corpus.examples.push_back({t.state_text, t.action_text, true});
    for (int n = 0; n < options.negatives_per_positive; ++n) {
      const std::size_t pick = eligible[rng.uniform_below(eligible.size())];
      ++corpus.negatives;
      if (is_applicable(state, pool[pick])) ++corpus.false_negatives;
      corpus.examples.push_back({t.state_text, pool_text[pick], false});
    }
  }
  return corpus;
}

namespace {

std::vector<Trajectory> explore_many(int count, const CorpusOptions& o, std::uint64_t seed,
                                     StreamDomain domain, int workers) {
  std::vector<Trajectory> out(static_cast<std::size_t>(std::max(count, 0)));
  parallel_for(out.size(), workers, [&](std::size_t i) {
    Rng rng(derive_seed(seed, domain, {i}));
    const int blocks = rng.uniform_int(o.min_blocks, o.max_blocks);
    const State initial = random_initial_state(blocks, rng);
    out[i] = explore_trajectory(initial, o.max_len, rng);
  });
  std::erase_if(out, [](const Trajectory& t) { return t.length() == 0; });
  return out;
}

}  // namespace

Corpus build_trajectory_corpus(const CorpusOptions& options, std::uint64_t seed, int workers) {
  if (options.min_blocks < 1 || options.max_blocks < options.min_blocks) {
    throw ConfigError("invalid block range");
  }
  if (options.max_len < 1) throw ConfigError("max_len must be >= 1");
  Corpus c;
  c.train = explore_many(options.num_states, options, seed, StreamDomain::kTrainStates, workers);
  c.validation = explore_many(options.validation_states, options, seed,
                              StreamDomain::kValidationStates, workers);
  return c;
}

int sample_goal_index(int length, bool inclusive_midpoint, Rng& rng) {
  int lo = length / 2 + (inclusive_midpoint ? 0 : 1);
  lo = std::max(lo, 1);
  return rng.uniform_int(lo, length);
}

std::vector<TestInstance> build_test_set(const TestSetOptions& options, std::uint64_t seed,
                                         int workers) {
  if (options.count < 1) throw ConfigError("test set count must be >= 1");
  if (options.max_len < 2) throw ConfigError("test trajectories need max_len >= 2");
  std::vector<TestInstance> out(static_cast<std::size_t>(options.count));
  parallel_for(out.size(), workers, [&](std::size_t i) {
    for (std::uint64_t retry = 0;; ++retry) {
      Rng rng(derive_seed(seed, StreamDomain::kTestStates, {i, retry}));
      const int blocks = rng.uniform_int(options.min_blocks, options.max_blocks);
      const State initial = random_initial_state(blocks, rng);
      const Trajectory t = explore_trajectory(initial, options.max_len, rng);
      const int length = static_cast<int>(t.length());
      if (length < 2) {
        if (retry >= 10000) throw ConfigError("block range never yields trajectories of length >= 2");
        continue;
      }
      const int g = sample_goal_index(length, options.inclusive_midpoint, rng);
      out[i] = TestInstance{initial, t.states[static_cast<std::size_t>(g)], g};
      return;
    }
  });
  return out;
}

}  // namespace vgplan
