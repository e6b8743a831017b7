#include "vgplan/planner.hpp"

#include <cmath>
#include <memory>

#include "vgplan/decoder.hpp"
#include "vgplan/errors.hpp"
#include "vgplan/parallel.hpp"

namespace vgplan {

void InferenceConfig::validate() const {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (max_plan_length < 1) throw ConfigError("max_plan_length must be >= 1");
  if (batch_slots < 1) throw ConfigError("batch_slots must be >= 1");
  if (!std::isfinite(threshold)) throw ConfigError("threshold must be finite");
  sampling.validate();
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::kGoalMatched: return "goal-matched";
    case Termination::kLengthExceeded: return "length-exceeded";
    case Termination::kVerifierRejected: return "verifier-rejected";
    case Termination::kParseFailed: return "parse-failed";
    case Termination::kInapplicable: return "inapplicable";
  }
  return "?";
}

std::vector<char> PassThroughGate::approve(const std::vector<GateQuery>& queries) const {
  return std::vector<char>(queries.size(), 1);
}

LearnedGate::LearnedGate(const Transformer<float>& verifier, const Vocabulary& vocab, double threshold)
    : verifier_(verifier), vocab_(vocab), threshold_(threshold) {
  if (verifier.head() != HeadKind::kClassifier) throw ShapeMismatch("verifier needs a classifier head");
}

std::vector<char> LearnedGate::approve(const std::vector<GateQuery>& queries) const {
  if (threshold_ <= 0.0) return std::vector<char>(queries.size(), 1);
  if (threshold_ >= 1.0) return std::vector<char>(queries.size(), 0);
  std::vector<TokenSequence> seqs;
  seqs.reserve(queries.size());
  for (const auto& q : queries) {
    seqs.push_back(build_verifier_input(vocab_, *q.state_text, *q.action_text));
    if (seqs.back().size() > static_cast<std::size_t>(verifier_.config().context)) {
      throw ContextOverflow("verifier input exceeds context");
    }
  }
  const auto logits = classifier_logits(verifier_, seqs);
  const double cut = std::log(threshold_ / (1.0 - threshold_));
  std::vector<char> out(queries.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<double>(logits[i]) >= cut;
  return out;
}

std::vector<char> OracleGate::approve(const std::vector<GateQuery>& queries) const {
  std::vector<char> out(queries.size(), 0);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto& q = queries[i];
    try {
      const GroundedAction a = parse_action(*q.action_text);
      if (q.true_state) {
        out[i] = is_applicable(*q.true_state, a);
      } else {
        out[i] = is_applicable(parse_state(*q.state_text).state, a);
      }
    } catch (const ParseError&) {
    } catch (const ArityError&) {
    }
  }
  return out;
}

bool verifier_gate(const TransitionGate& gate, const std::string& state_text,
                   const std::string& action_text, const State* true_state) {
  return gate.approve({GateQuery{&state_text, &action_text, true_state}}).front() != 0;
}

namespace {

struct ParsedCompletion {
  std::string action_text;
  std::string next_state_text;
  GroundedAction action;
};

// Throws GenerationParseError.
ParsedCompletion parse_completion(const Vocabulary& vocab, const TokenSequence& completion) {
  CompletionParts parts = split_completion(vocab, completion);
  ParsedCompletion out;
  try {
    out.action = parse_action(parts.action_text);
    parse_state(parts.next_state_text);
  } catch (const ParseError& e) {
    throw GenerationParseError(e.what());
  } catch (const ArityError& e) {
    throw GenerationParseError(e.what());
  }
  out.action_text = std::move(parts.action_text);
  out.next_state_text = std::move(parts.next_state_text);
  return out;
}

bool completion_done(const TokenSequence& c, const SamplingParams& p, const KvCache<float>& kv) {
  return c.back() == Vocabulary::kEos || static_cast<int>(c.size()) >= p.max_tokens ||
         kv.length() >= kv.capacity();
}

struct InstanceRun {
  std::size_t index = 0;
  const PlanningInstance* instance = nullptr;
  std::string goal_text, initial_text;
  KvCache<float> prefix;  // GOAL: <goal> STATE:
  PlanResult result;
  int next_attempt = 0;
};

struct Slot {
  InstanceRun* run = nullptr;
  std::unique_ptr<Rng> rng;
  PlanAttempt attempt;
  std::string state_text;
  std::optional<State> shadow;
  KvCache<float> kv;
  TokenSequence completion;
};

class Engine {
 public:
  Engine(const Transformer<float>& generator, const Vocabulary& vocab, const TransitionGate* gate,
         const InferenceConfig& config, std::uint64_t seed, const RolloutOptions& options)
      : dec_(generator), vocab_(vocab), gate_(gate), cfg_(config), seed_(seed), opt_(options) {}

  void run(std::vector<InstanceRun*> runs) {
    std::size_t next = 0;
    std::vector<std::unique_ptr<Slot>> slots;
    const auto cap = static_cast<std::size_t>(cfg_.batch_slots);
    while (true) {
      while (slots.size() < cap && next < runs.size()) {
        InstanceRun* r = runs[next++];
        if (admit(*r)) {
          auto s = std::make_unique<Slot>();
          s->run = r;
          start_attempt(*s);
          slots.push_back(std::move(s));
        }
      }
      if (slots.empty()) break;
      step_all(slots);
      std::erase_if(slots, [](const std::unique_ptr<Slot>& s) { return s->run == nullptr; });
    }
  }

 private:
  // Returns false when the instance needs no rollout.
  bool admit(InstanceRun& r) {
    r.goal_text = serialize_state(r.instance->goal);
    r.initial_text = serialize_state(r.instance->initial);
    if (r.initial_text == r.goal_text) {
      r.result.plan = std::vector<std::string>{};
      r.result.attempts_used = 1;
      r.result.successful_attempt = 1;
      r.result.attempts.push_back(PlanAttempt{{}, Termination::kGoalMatched, {}});
      return false;
    }
    TokenSequence prefix{vocab_.goal_marker()};
    const auto goal = tokenize(vocab_, r.goal_text);
    prefix.insert(prefix.end(), goal.begin(), goal.end());
    prefix.push_back(vocab_.state_marker());
    r.prefix = KvCache<float>(dec_.model().config());
    dec_.advance({&r.prefix}, {std::span<const TokenId>(prefix)});
    return true;
  }

  void start_attempt(Slot& s) {
    InstanceRun& r = *s.run;
    const int a = r.next_attempt++;
    r.result.attempts_used = r.next_attempt;
    s.rng = std::make_unique<Rng>(derive_seed(seed_, opt_.domain,
                                              {static_cast<std::uint64_t>(r.index),
                                               static_cast<std::uint64_t>(a)}));
    s.attempt = PlanAttempt{};
    s.state_text = r.initial_text;
    s.shadow = r.instance->initial;
  }

  // Records the finished attempt; then either starts the next one or
  // releases the slot (run = nullptr).
  void finish_attempt(Slot& s, Termination t) {
    InstanceRun& r = *s.run;
    s.attempt.termination = t;
    const bool success = t == Termination::kGoalMatched;
    if (success && !r.result.plan) {
      std::vector<std::string> plan;
      for (const auto& st : s.attempt.steps) plan.push_back(st.action_text);
      r.result.plan = std::move(plan);
      r.result.successful_attempt = r.next_attempt;
    }
    if (opt_.keep_attempts || (success && r.result.successful_attempt == r.next_attempt)) {
      r.result.attempts.push_back(std::move(s.attempt));
    }
    const bool stop = (success && opt_.stop_at_goal) || r.next_attempt >= cfg_.k;
    if (stop) {
      s.run = nullptr;
      return;
    }
    start_attempt(s);
  }

  void step_all(std::vector<std::unique_ptr<Slot>>& slots) {
    const SamplingParams& sp = cfg_.sampling;
    // Prompts.
    std::vector<Slot*> active;
    std::vector<TokenSequence> prompt_tokens;
    for (auto& sp_ : slots) {
      Slot& s = *sp_;
      s.kv.assign_prefix(s.run->prefix, s.run->prefix.length());
      TokenSequence toks = tokenize(vocab_, s.state_text);
      if (toks.empty() || s.kv.length() + toks.size() >= s.kv.capacity()) {
        s.attempt.failure = "prompt does not fit the context";
        finish_attempt(s, Termination::kParseFailed);
        continue;
      }
      s.completion.clear();
      active.push_back(&s);
      prompt_tokens.push_back(std::move(toks));
    }
    if (active.empty()) return;
    {
      std::vector<KvCache<float>*> caches;
      std::vector<std::span<const TokenId>> spans;
      for (std::size_t i = 0; i < active.size(); ++i) {
        caches.push_back(&active[i]->kv);
        spans.emplace_back(prompt_tokens[i]);
      }
      sample_into(active, dec_.advance(caches, spans));
    }
    // Completions, one token per live slot per round.
    while (true) {
      std::vector<Slot*> live;
      for (Slot* s : active) {
        if (!completion_done(s->completion, sp, s->kv)) live.push_back(s);
      }
      if (live.empty()) break;
      std::vector<KvCache<float>*> caches;
      std::vector<std::span<const TokenId>> spans;
      for (Slot* s : live) {
        caches.push_back(&s->kv);
        spans.emplace_back(&s->completion.back(), 1);
      }
      sample_into(live, dec_.advance(caches, spans));
    }
    // Parse, gate, advance.
    std::vector<Slot*> parsed;
    std::vector<ParsedCompletion> parts;
    for (Slot* s : active) {
      try {
        parts.push_back(parse_completion(vocab_, s->completion));
        parsed.push_back(s);
      } catch (const GenerationParseError& e) {
        s->attempt.failure = e.what();
        finish_attempt(*s, Termination::kParseFailed);
      }
    }
    std::vector<char> approved(parsed.size(), 1);
    if (gate_ && !parsed.empty()) {
      std::vector<GateQuery> queries;
      for (std::size_t i = 0; i < parsed.size(); ++i) {
        queries.push_back({&parsed[i]->state_text, &parts[i].action_text,
                           parsed[i]->shadow ? &*parsed[i]->shadow : nullptr});
      }
      approved = gate_->approve(queries);
    }
    for (std::size_t i = 0; i < parsed.size(); ++i) {
      Slot& s = *parsed[i];
      ParsedCompletion& pc = parts[i];
      const bool applicable = s.shadow && is_applicable(*s.shadow, pc.action);
      if (cfg_.oracle_states) {
        if (!applicable) {
          s.attempt.steps.push_back({s.state_text, pc.action_text, pc.next_state_text, approved[i] != 0});
          finish_attempt(s, approved[i] ? Termination::kInapplicable : Termination::kVerifierRejected);
          continue;
        }
        pc.next_state_text = serialize_state(apply(*s.shadow, pc.action));
      }
      s.attempt.steps.push_back({s.state_text, pc.action_text, pc.next_state_text, approved[i] != 0});
      if (!approved[i]) {
        finish_attempt(s, Termination::kVerifierRejected);
        continue;
      }
      if (applicable) {
        s.shadow = apply(*s.shadow, pc.action);
      } else {
        s.shadow.reset();
      }
      s.state_text = std::move(pc.next_state_text);
      if (s.state_text == s.run->goal_text) {
        finish_attempt(s, Termination::kGoalMatched);
      } else if (static_cast<int>(s.attempt.steps.size()) >= cfg_.max_plan_length) {
        finish_attempt(s, Termination::kLengthExceeded);
      }
    }
  }

  void sample_into(const std::vector<Slot*>& slots, const std::vector<float>& logits) {
    const std::size_t v = vocab_.size();
    for (std::size_t i = 0; i < slots.size(); ++i) {
      const std::span<const float> row(logits.data() + i * v, v);
      const TokenId t = sample_token(row, cfg_.sampling, *slots[i]->rng);
      slots[i]->completion.push_back(t);
    }
  }

  Decoder<float> dec_;
  const Vocabulary& vocab_;
  const TransitionGate* gate_;
  const InferenceConfig& cfg_;
  std::uint64_t seed_;
  RolloutOptions opt_;
};

}  // namespace

GeneratedTransition generate_transition(const Transformer<float>& generator, const Vocabulary& vocab,
                                        const std::string& goal_text, const std::string& state_text,
                                        const SamplingParams& params, Rng& rng) {
  params.validate();
  const TokenSequence prompt = build_prompt(vocab, goal_text, state_text);
  if (prompt.size() >= static_cast<std::size_t>(generator.config().context)) {
    throw ContextOverflow("prompt of " + std::to_string(prompt.size()) + " tokens fills the context");
  }
  Decoder<float> dec(generator);
  KvCache<float> kv(generator.config());
  TokenSequence completion;
  auto logits = dec.advance({&kv}, {std::span<const TokenId>(prompt)});
  completion.push_back(sample_token(std::span<const float>(logits), params, rng));
  while (!completion_done(completion, params, kv)) {
    logits = dec.advance({&kv}, {std::span<const TokenId>(&completion.back(), 1)});
    completion.push_back(sample_token(std::span<const float>(logits), params, rng));
  }
  ParsedCompletion pc = parse_completion(vocab, completion);
  return {std::move(pc.action_text), std::move(pc.next_state_text)};
}

std::vector<TranscriptEntry> plan_transcript(const PlanningInstance& instance, const PlanResult& r) {
  std::vector<TranscriptEntry> out;
  if (!r.plan) return out;
  const std::string goal = serialize_state(instance.goal);
  for (const auto& a : r.attempts) {
    if (a.termination != Termination::kGoalMatched) continue;
    for (const auto& st : a.steps) out.push_back({goal, st.state_text, st.action_text, st.next_state_text});
    break;
  }
  return out;
}

std::vector<PlanResult> plan_instances(const Transformer<float>& generator, const Vocabulary& vocab,
                                       const TransitionGate* gate,
                                       const std::vector<PlanningInstance>& instances,
                                       const InferenceConfig& config, std::uint64_t seed,
                                       const RolloutOptions& options) {
  config.validate();
  if (generator.head() != HeadKind::kLanguageModel) throw ShapeMismatch("generator needs an LM head");
  std::vector<InstanceRun> runs(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    runs[i].index = i;
    runs[i].instance = &instances[i];
  }
  const auto workers = static_cast<std::size_t>(std::max(1, options.workers));
  parallel_for(std::min(workers, std::max<std::size_t>(runs.size(), 1)), options.workers, [&](std::size_t w) {
    std::vector<InstanceRun*> mine;
    for (std::size_t i = w; i < runs.size(); i += workers) mine.push_back(&runs[i]);
    Engine engine(generator, vocab, gate, config, seed, options);
    engine.run(std::move(mine));
  });
  std::vector<PlanResult> out;
  out.reserve(runs.size());
  for (auto& r : runs) out.push_back(std::move(r.result));
  return out;
}

PlanResult plan_generator_at_k(const Transformer<float>& generator, const Vocabulary& vocab,
                               const PlanningInstance& instance, const InferenceConfig& config,
                               Rng& rng) {
  return plan_instances(generator, vocab, nullptr, {instance}, config, rng.next_u64()).front();
}

PlanResult plan_generator_verifier_at_k(const Transformer<float>& generator,
                                        const TransitionGate& verifier, const Vocabulary& vocab,
                                        const PlanningInstance& instance,
                                        const InferenceConfig& config, Rng& rng) {
  return plan_instances(generator, vocab, &verifier, {instance}, config, rng.next_u64()).front();
}

}  // namespace vgplan
