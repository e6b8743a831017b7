#include <algorithm>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "vgplan/dataset.hpp"
#include "vgplan/errors.hpp"
#include "vgplan/records.hpp"
#include "test_support.hpp"

using namespace vgplan;
using testing_support::TempDir;

namespace {

CorpusOptions small_corpus() { return CorpusOptions{60, 10, 3, 5, 20}; }

std::vector<Transition> small_transitions(std::uint64_t seed = 3) {
  return build_generator_corpus(build_trajectory_corpus(small_corpus(), seed).train);
}

}  // namespace

TEST(Dataset, SingleBlockExploration) {
  Rng rng(1);
  const State s = random_initial_state(1, rng);
  const Trajectory t = explore_trajectory(s, 20, rng);
  ASSERT_EQ(t.length(), 1u);
  EXPECT_EQ(t.actions[0], GroundedAction::pickup(1));
  EXPECT_EQ(serialize_state(t.final_state()), "(holding b1)");
}

TEST(Dataset, TrajectoriesSatisfyInvariants) {
  Rng rng(17);
  for (int i = 0; i < 300; ++i) {
    const State s = random_initial_state(3 + static_cast<int>(rng.uniform_below(6)), rng);
    const Trajectory t = explore_trajectory(s, 20, rng);
    EXPECT_EQ(trajectory_violation(t), "");
    EXPECT_LE(t.length(), 20u);
    EXPECT_EQ(t.states.size(), t.actions.size() + 1);
    std::set<std::string> texts;
    for (std::size_t j = 0; j < t.states.size(); ++j) {
      texts.insert(serialize_state(t.states[j]));
      if (j) EXPECT_EQ(apply(t.states[j - 1], t.actions[j - 1]), t.states[j]);
    }
    EXPECT_EQ(texts.size(), t.states.size());
  }
}

TEST(Dataset, GeneratorCorpusShape) {
  Rng rng(4);
  Trajectory t;
  do {
    t = explore_trajectory(random_initial_state(4, rng), 5, rng);
  } while (t.length() != 5);
  const auto tr = build_generator_corpus({t});
  ASSERT_EQ(tr.size(), 5u);
  for (const auto& x : tr) EXPECT_EQ(x.goal_text, serialize_state(t.final_state()));
  EXPECT_EQ(tr.back().next_state_text, tr.back().goal_text);
  for (const auto& x : small_transitions()) EXPECT_TRUE(transition_is_sound(x));
}

TEST(Dataset, SoundnessRejectsTamperedTransition) {
  auto tr = small_transitions().front();
  EXPECT_TRUE(transition_is_sound(tr));
  tr.next_state_text = tr.state_text;
  EXPECT_FALSE(transition_is_sound(tr));
}

TEST(Dataset, VerifierCorpusCountsAndLabels) {
  const auto tr = small_transitions();
  Rng rng(8);
  for (int npp : {1, 3}) {
    const VerifierCorpus vc = build_verifier_corpus(tr, {npp, NegativeMode::kGlobal, false}, rng);
    EXPECT_EQ(vc.examples.size(), tr.size() * static_cast<std::size_t>(1 + npp));
    EXPECT_EQ(vc.negatives, tr.size() * static_cast<std::size_t>(npp));
    // Recount false negatives with the oracle.
    std::size_t fn = 0, positives = 0;
    for (const auto& e : vc.examples) {
      const bool applicable = is_applicable(parse_state(e.state_text).state, parse_action(e.action_text));
      if (e.valid) {
        ++positives;
        EXPECT_TRUE(applicable);
      } else if (applicable) {
        ++fn;
      }
    }
    EXPECT_EQ(positives, tr.size());
    EXPECT_EQ(fn, vc.false_negatives);
    EXPECT_LT(vc.label_noise_rate(), 0.25);
  }
}

TEST(Dataset, OracleFilterRemovesFalseNegatives) {
  const auto tr = small_transitions();
  Rng rng(9);
  const VerifierCorpus vc = build_verifier_corpus(tr, {2, NegativeMode::kGlobal, true}, rng);
  EXPECT_EQ(vc.false_negatives, 0u);
  for (const auto& e : vc.examples) {
    EXPECT_EQ(e.valid, is_applicable(parse_state(e.state_text).state, parse_action(e.action_text)));
  }
}

TEST(Dataset, InstanceRestrictedNegativesStayInUniverse) {
  const auto tr = small_transitions();
  Rng rng(10);
  const VerifierCorpus vc = build_verifier_corpus(tr, {1, NegativeMode::kInstanceRestricted, false}, rng);
  for (const auto& e : vc.examples) {
    const State s = parse_state(e.state_text).state;
    const GroundedAction a = parse_action(e.action_text);
    for (int i = 0; i < param_count(a.kind); ++i) EXPECT_TRUE(s.in_universe(a.args[i]));
  }
}

TEST(Dataset, PutdownNegativeIsTrulyInvalid) {
  const State s = parse_state("(arm-empty)\n(clear b1)\n(on-table b1)").state;
  EXPECT_FALSE(is_applicable(s, parse_action("(putdown b1)")));
  // With a single-action pool, the drawn negative is exactly that action.
  Transition t{"(holding b1)", serialize_state(s), "(pickup b1)", "(holding b1)"};
  Transition u{"(arm-empty)\n(clear b1)\n(on-table b1)", "(holding b1)", "(putdown b1)",
               "(arm-empty)\n(clear b1)\n(on-table b1)"};
  Rng rng(0);
  const VerifierCorpus vc = build_verifier_corpus({t, u}, {4, NegativeMode::kGlobal, false}, rng);
  for (const auto& e : vc.examples) {
    if (!e.valid && e.state_text == t.state_text && e.action_text == "(putdown b1)") {
      EXPECT_FALSE(is_applicable(s, parse_action(e.action_text)));
    }
  }
  EXPECT_THROW(build_verifier_corpus({}, {}, rng), EmptyActionPool);
}

TEST(Dataset, GoalIndexConvention) {
  Rng rng(12);
  std::set<int> seen;
  for (int i = 0; i < 5000; ++i) seen.insert(sample_goal_index(30, false, rng));
  EXPECT_EQ(*seen.begin(), 16);
  EXPECT_EQ(*seen.rbegin(), 30);
  EXPECT_EQ(seen.size(), 15u);
  seen.clear();
  for (int i = 0; i < 5000; ++i) seen.insert(sample_goal_index(30, true, rng));
  EXPECT_EQ(*seen.begin(), 15);
  for (int i = 0; i < 200; ++i) {
    EXPECT_EQ(sample_goal_index(1, false, rng), 1);
    EXPECT_EQ(sample_goal_index(1, true, rng), 1);
  }
}

TEST(Dataset, TestSet) {
  TestSetOptions opt;
  opt.count = 40;
  const auto tests = build_test_set(opt, 21);
  ASSERT_EQ(tests.size(), 40u);
  EXPECT_EQ(TestSetOptions{}.count, 200);
  for (const auto& t : tests) {
    EXPECT_FALSE(t.initial == t.goal);
    EXPECT_TRUE(is_consistent(t.initial));
    EXPECT_TRUE(is_consistent(t.goal));
    EXPECT_GE(t.source_length, 1);
    EXPECT_GE(static_cast<int>(t.initial.universe().size()), opt.min_blocks);
    EXPECT_LE(static_cast<int>(t.initial.universe().size()), opt.max_blocks);
  }
  EXPECT_EQ(build_test_set(opt, 21), tests);
  EXPECT_EQ(build_test_set(opt, 21, 3), tests);
  EXPECT_NE(build_test_set(opt, 22), tests);
}

TEST(Dataset, CorpusIndependentOfWorkers) {
  const Corpus a = build_trajectory_corpus(small_corpus(), 5, 1);
  const Corpus b = build_trajectory_corpus(small_corpus(), 5, 4);
  ASSERT_EQ(a.train.size(), b.train.size());
  ASSERT_EQ(a.validation.size(), b.validation.size());
  for (std::size_t i = 0; i < a.train.size(); ++i) EXPECT_EQ(to_record(a.train[i]), to_record(b.train[i]));
  for (const auto& t : a.train) EXPECT_GE(t.length(), 1u);
}

TEST(Records, TransitionRoundTrip) {
  TempDir dir;
  auto tr = small_transitions(1);
  while (tr.size() < 1000) {
    const auto more = small_transitions(tr.size());
    tr.insert(tr.end(), more.begin(), more.end());
  }
  tr.resize(1000);
  write_records(dir / "t.jsonl", tr);
  EXPECT_EQ(read_records<Transition>(dir / "t.jsonl"), tr);
}

TEST(Records, OtherRecordTypesRoundTrip) {
  TempDir dir;
  const auto tr = small_transitions();
  Rng rng(3);
  const auto vc = build_verifier_corpus(tr, {}, rng);
  write_records(dir / "v.jsonl", vc.examples);
  EXPECT_EQ(read_records<VerifierExample>(dir / "v.jsonl"), vc.examples);

  TestSetOptions opt;
  opt.count = 10;
  const auto tests = build_test_set(opt, 1);
  write_records(dir / "i.jsonl", tests);
  EXPECT_EQ(read_records<TestInstance>(dir / "i.jsonl"), tests);

  std::vector<TrajectoryRecord> trs;
  for (const auto& t : build_trajectory_corpus(small_corpus(), 2).train) trs.push_back(to_record(t));
  write_records(dir / "r.jsonl", trs);
  EXPECT_EQ(read_records<TrajectoryRecord>(dir / "r.jsonl"), trs);
}

TEST(Records, EmptyAndCorrupted) {
  TempDir dir;
  { std::ofstream(dir / "empty.jsonl"); }
  EXPECT_TRUE(read_records<Transition>(dir / "empty.jsonl").empty());

  const auto tr = small_transitions();
  write_records(dir / "t.jsonl", std::vector<Transition>(tr.begin(), tr.begin() + 10));
  std::string text = testing_support::slurp(dir / "t.jsonl");
  std::size_t pos = 0;
  for (int line = 1; line < 7; ++line) pos = text.find('\n', pos) + 1;
  text.insert(pos + 5, "}{garbage");
  { std::ofstream(dir / "t.jsonl", std::ios::binary) << text; }
  try {
    read_records<Transition>(dir / "t.jsonl");
    FAIL() << "expected DecodeError";
  } catch (const DecodeError& e) {
    EXPECT_EQ(e.line(), 7u);
  }
  EXPECT_THROW(read_records<Transition>(dir / "missing.jsonl"), IoError);
}
