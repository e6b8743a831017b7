#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "vgplan/blocksworld.hpp"
#include "vgplan/errors.hpp"
#include "vgplan/transcript.hpp"
#include "test_support.hpp"

using namespace vgplan;

namespace {

const std::string kAppendixGoal =
    "(arm-empty)\n(clear b1)\n(clear b2)\n(on b1 b3)\n(on b3 b4)\n(on-table b2)\n(on-table b4)";

State st(const std::string& text) { return parse_state(text).state; }

}  // namespace

TEST(Blocksworld, ArityTable) {
  EXPECT_EQ(arity(Predicate::kOn), 2);
  EXPECT_EQ(arity(Predicate::kOnTable), 1);
  EXPECT_EQ(arity(Predicate::kClear), 1);
  EXPECT_EQ(arity(Predicate::kHolding), 1);
  EXPECT_EQ(arity(Predicate::kArmEmpty), 0);
  EXPECT_EQ(param_count(ActionKind::kStack), 2);
  EXPECT_EQ(param_count(ActionKind::kPickup), 1);
}

TEST(Blocksworld, GroundActionCounts) {
  EXPECT_EQ(ground_all_actions({1}).size(), 2u);
  for (int n = 1; n <= 8; ++n) {
    std::vector<BlockId> u;
    for (int b = 1; b <= n; ++b) u.push_back(b);
    const auto acts = ground_all_actions(u);
    // Count independently: one- and two-argument groundings per schema.
    std::set<std::string> texts;
    for (const auto& a : acts) texts.insert(serialize_action(a));
    EXPECT_EQ(texts.size(), acts.size());
    EXPECT_EQ(acts.size(), static_cast<std::size_t>(2 * n + 2 * n * (n - 1))) << n;
  }
  std::vector<BlockId> three{1, 2, 3}, four{1, 2, 3, 4};
  EXPECT_EQ(ground_all_actions(three).size(), 18u);
  EXPECT_EQ(ground_all_actions(four).size(), 32u);
}

TEST(Blocksworld, AppendixGoalSerialization) {
  const auto plan = example_plan();
  EXPECT_EQ(serialize_state(st(plan.front().goal)), kAppendixGoal);
  EXPECT_EQ(serialize_state(State{}), "");
}

TEST(Blocksworld, AppendixTransitionsOneAndTwo) {
  const auto plan = example_plan();
  const State s1 = st(plan[0].state);
  const GroundedAction a1 = parse_action(plan[0].action);
  EXPECT_EQ(a1, GroundedAction::unstack(1, 4));
  EXPECT_TRUE(is_applicable(s1, a1));
  EXPECT_EQ(serialize_state(apply(s1, a1)), plan[0].next_state);

  const State s2 = st(plan[1].state);
  EXPECT_EQ(parse_action(plan[1].action), GroundedAction::putdown(1));
  EXPECT_EQ(serialize_state(apply(s2, parse_action(plan[1].action))), plan[1].next_state);
}

TEST(Blocksworld, AppendixFinalStateIsGoal) {
  const auto plan = example_plan();
  EXPECT_TRUE(is_goal(st(plan.back().next_state), st(plan.front().goal)));
}

TEST(Blocksworld, AppendixStateBlocksRoundTrip) {
  // 40 states + 40 next states + the goal.
  const auto plan = example_plan();
  int blocks = 0;
  for (const auto& e : plan) {
    for (const auto* text : {&e.state, &e.next_state}) {
      EXPECT_EQ(serialize_state(st(*text)), *text);
      ++blocks;
    }
  }
  EXPECT_EQ(serialize_state(st(plan.front().goal)), plan.front().goal);
  EXPECT_EQ(blocks + 1, 81);
}

TEST(Blocksworld, ApplicabilityExamples) {
  const State holding2 = st("(holding b2)\n(on-table b1)\n(clear b1)");
  EXPECT_FALSE(is_applicable(holding2, GroundedAction::pickup(1)));
  EXPECT_THROW(apply(holding2, GroundedAction::pickup(1)), InapplicableAction);

  const State table3 = st("(arm-empty)\n(clear b1)\n(clear b2)\n(clear b3)\n(on-table b1)\n(on-table b2)\n(on-table b3)");
  auto acts = applicable_actions(table3);
  std::sort(acts.begin(), acts.end());
  EXPECT_EQ(acts, (std::vector<GroundedAction>{GroundedAction::pickup(1), GroundedAction::pickup(2),
                                               GroundedAction::pickup(3)}));

  const State held = st("(holding b1)\n(clear b2)\n(clear b3)\n(on-table b2)\n(on-table b3)");
  acts = applicable_actions(held);
  std::sort(acts.begin(), acts.end());
  std::vector<GroundedAction> want{GroundedAction::putdown(1), GroundedAction::stack(1, 2),
                                   GroundedAction::stack(1, 3)};
  std::sort(want.begin(), want.end());
  EXPECT_EQ(acts, want);
}

TEST(Blocksworld, ApplicableActionsMatchBruteForce) {
  const State s1 = st(example_plan()[0].state);
  std::vector<GroundedAction> brute;
  for (const auto& a : ground_all_actions(s1.universe())) {
    // Precondition check written out against the proposition set.
    bool ok = true;
    for (const auto& p : effects(a).pre) ok = ok && s1.contains(p);
    if (ok) brute.push_back(a);
  }
  auto got = applicable_actions(s1);
  std::sort(got.begin(), got.end());
  std::sort(brute.begin(), brute.end());
  EXPECT_EQ(got, brute);
  EXPECT_EQ(got, std::vector<GroundedAction>{GroundedAction::unstack(1, 4)});
}

TEST(Blocksworld, PickupPutdownInverse) {
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const State s = random_initial_state(1 + static_cast<int>(rng.uniform_below(6)), rng);
    for (BlockId b : s.universe()) {
      if (!is_applicable(s, GroundedAction::pickup(b))) continue;
      EXPECT_EQ(apply(apply(s, GroundedAction::pickup(b)), GroundedAction::putdown(b)), s);
    }
  }
}

TEST(Blocksworld, GoalTest) {
  const State g = st(kAppendixGoal);
  EXPECT_TRUE(is_goal(g, g));
  auto props = g.props();
  props.pop_back();
  EXPECT_FALSE(is_goal(State(props, g.universe()), g));
}

TEST(Blocksworld, ParseExamples) {
  EXPECT_EQ(parse_action("(unstack b1 b4)"), GroundedAction::unstack(1, 4));
  EXPECT_THROW(parse_action("(pickup)"), ArityError);
  EXPECT_THROW(parse_state("(on b1)"), ArityError);
  EXPECT_THROW(parse_state("(clear b1"), ParseError);
  EXPECT_THROW(parse_action("(teleport b1)"), ParseError);
  EXPECT_EQ(st("(clear b1)\n(clear b1)").size(), 1u);
  // Whitespace variants parse to the same state.
  EXPECT_EQ(st("(clear   b1)   (arm-empty)\t(on-table b1)"), st("(arm-empty)\n(clear b1)\n(on-table b1)"));
  // Inconsistent states are representable.
  const ParsedState bad = parse_state("(holding b1)\n(arm-empty)\n(on-table b1)");
  EXPECT_FALSE(bad.consistent);
}

TEST(Blocksworld, ByteWiseOrder) {
  // "(on b1 b3)" sorts before "(on-table b2)" because ' ' < '-'.
  const std::string text = serialize_state(st("(on-table b2)\n(on b1 b3)"));
  EXPECT_EQ(text, "(on b1 b3)\n(on-table b2)");
}

TEST(Blocksworld, SingleBlockInitialState) {
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(serialize_state(random_initial_state(1, rng)), "(arm-empty)\n(clear b1)\n(on-table b1)");
  }
}

TEST(Blocksworld, ThreeBlockConfigurationsCovered) {
  const auto all = testing_support::enumerate_arm_empty_states(3);
  EXPECT_EQ(all.size(), 13u);
  std::set<std::string> seen;
  Rng rng(2024);
  for (int i = 0; i < 10000; ++i) seen.insert(serialize_state(random_initial_state(3, rng)));
  EXPECT_EQ(seen, all);
}

TEST(Blocksworld, EnumerationCountsMatchLahNumbers) {
  // Arm-empty configurations of n labelled blocks: 1, 3, 13, 73, 501.
  const std::size_t want[] = {1, 3, 13, 73, 501};
  for (int n = 1; n <= 5; ++n) {
    EXPECT_EQ(testing_support::enumerate_arm_empty_states(n).size(), want[n - 1]) << n;
  }
}

TEST(BlocksworldProperty, ApplyPreservesConsistency) {
  Rng rng(99);
  int steps = 0;
  for (int walk = 0; walk < 200; ++walk) {
    State s = random_initial_state(1 + static_cast<int>(rng.uniform_below(8)), rng);
    ASSERT_EQ(testing_support::physical_violation(s), "");
    for (int t = 0; t < 50; ++t, ++steps) {
      const auto all = ground_all_actions(s.universe());
      const auto& a = all[rng.uniform_below(all.size())];
      if (!is_applicable(s, a)) {
        EXPECT_THROW(apply(s, a), InapplicableAction);
        continue;
      }
      s = apply(s, a);
      ASSERT_EQ(testing_support::physical_violation(s), "") << serialize_state(s);
      ASSERT_TRUE(is_consistent(s));
    }
  }
  EXPECT_EQ(steps, 10000);
}

TEST(BlocksworldProperty, SerializationSortedAndRoundTrips) {
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    State s = random_initial_state(1 + static_cast<int>(rng.uniform_below(8)), rng);
    for (int t = 0; t < 5; ++t) {
      const auto acts = applicable_actions(s);
      s = apply(s, acts[rng.uniform_below(acts.size())]);
    }
    const std::string text = serialize_state(s);
    std::vector<std::string> lines;
    std::size_t start = 0;
    for (std::size_t p; (p = text.find('\n', start)) != std::string::npos; start = p + 1) {
      lines.push_back(text.substr(start, p - start));
    }
    lines.push_back(text.substr(start));
    EXPECT_TRUE(std::is_sorted(lines.begin(), lines.end()));
    EXPECT_EQ(st(text), s);
    EXPECT_EQ(serialize_state(st(text)), text);
    for (const auto& a : applicable_actions(s)) EXPECT_EQ(parse_action(serialize_action(a)), a);
  }
}

TEST(BlocksworldProperty, ApplyMatchesStripsDefinition) {
  // apply(s, a) == (s \ del) ∪ add, computed here with std::set.
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    State s = random_initial_state(2 + static_cast<int>(rng.uniform_below(6)), rng);
    for (int t = 0; t < 10; ++t) {
      const auto acts = applicable_actions(s);
      const auto& a = acts[rng.uniform_below(acts.size())];
      std::set<Proposition> want(s.props().begin(), s.props().end());
      const ActionEffects e = effects(a);
      for (const auto& p : e.del) want.erase(p);
      for (const auto& p : e.add) want.insert(p);
      s = apply(s, a);
      EXPECT_EQ(std::set<Proposition>(s.props().begin(), s.props().end()), want);
    }
  }
}

TEST(BlocksworldProperty, AgreesWithTextLevelSchemas) {
  // Applicability and successors against schemas written over raw text.
  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    State s = random_initial_state(3 + static_cast<int>(rng.uniform_below(6)), rng);
    const auto all = ground_all_actions(s.universe());
    for (int t = 0; t < 12; ++t) {
      const std::string text = serialize_state(s);
      for (const auto& a : all) {
        const auto next = testing_support::strips_apply(text, serialize_action(a));
        ASSERT_EQ(next.has_value(), is_applicable(s, a)) << text << "\n" << serialize_action(a);
        if (next) {
          ASSERT_EQ(*next, serialize_state(apply(s, a)));
        }
      }
      const auto acts = applicable_actions(s);
      s = apply(s, acts[rng.uniform_below(acts.size())]);
    }
  }
}

TEST(Blocksworld, FixtureAgreesWithTextLevelSchemas) {
  for (const auto& e : example_plan()) {
    EXPECT_EQ(testing_support::strips_apply(e.state, e.action), e.next_state) << e.action;
  }
}
