#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vgplan/rng.hpp"

namespace vgplan {

// Blocks are named "b<id>" with id >= 1.
using BlockId = int;

std::string block_name(BlockId id);

enum class Predicate : std::uint8_t { kArmEmpty, kClear, kHolding, kOn, kOnTable };

int arity(Predicate p);
std::string_view predicate_name(Predicate p);
std::optional<Predicate> predicate_from_name(std::string_view name);

struct Proposition {
  Predicate symbol = Predicate::kArmEmpty;
  std::array<BlockId, 2> args{0, 0};  // unused slots are 0

  static Proposition arm_empty() { return {Predicate::kArmEmpty, {0, 0}}; }
  static Proposition clear(BlockId x) { return {Predicate::kClear, {x, 0}}; }
  static Proposition holding(BlockId x) { return {Predicate::kHolding, {x, 0}}; }
  static Proposition on(BlockId x, BlockId y) { return {Predicate::kOn, {x, y}}; }
  static Proposition on_table(BlockId x) { return {Predicate::kOnTable, {x, 0}}; }

  std::string to_string() const;

  auto operator<=>(const Proposition&) const = default;
  bool operator==(const Proposition&) const = default;
};

// A set of propositions over a block universe. Props are kept sorted and
// unique (by structural order; canonical text order is applied at
// serialization). A State need not be physically consistent: model outputs
// are parsed into States too, and `is_consistent` reports the verdict.
class State {
 public:
  State() = default;
  // Universe defaults to the blocks mentioned by `props`.
  explicit State(std::vector<Proposition> props);
  State(std::vector<Proposition> props, std::vector<BlockId> universe);

  const std::vector<Proposition>& props() const { return props_; }
  const std::vector<BlockId>& universe() const { return universe_; }

  bool contains(const Proposition& p) const;
  bool in_universe(BlockId b) const;
  std::size_t size() const { return props_.size(); }

  bool operator==(const State& other) const { return props_ == other.props_; }

 private:
  std::vector<Proposition> props_;
  std::vector<BlockId> universe_;
};

// Checks the physical invariants of a Blocksworld state over its universe.
// Returns nullopt when consistent, otherwise a description of the first
// violation found.
std::optional<std::string> consistency_violation(const State& s);
inline bool is_consistent(const State& s) { return !consistency_violation(s); }

enum class ActionKind : std::uint8_t { kPickup, kPutdown, kStack, kUnstack };

int param_count(ActionKind k);
std::string_view action_name(ActionKind k);
std::optional<ActionKind> action_from_name(std::string_view name);

struct GroundedAction {
  ActionKind kind = ActionKind::kPickup;
  std::array<BlockId, 2> args{0, 0};

  static GroundedAction pickup(BlockId x) { return {ActionKind::kPickup, {x, 0}}; }
  static GroundedAction putdown(BlockId x) { return {ActionKind::kPutdown, {x, 0}}; }
  static GroundedAction stack(BlockId x, BlockId y) { return {ActionKind::kStack, {x, y}}; }
  static GroundedAction unstack(BlockId x, BlockId y) { return {ActionKind::kUnstack, {x, y}}; }

  auto operator<=>(const GroundedAction&) const = default;
  bool operator==(const GroundedAction&) const = default;
};

// Precondition, add and delete lists of a grounded action.
struct ActionEffects {
  std::vector<Proposition> pre;
  std::vector<Proposition> add;
  std::vector<Proposition> del;
};

ActionEffects effects(const GroundedAction& a);

struct PlanningInstance {
  State initial;
  State goal;
};

std::vector<GroundedAction> ground_all_actions(const std::vector<BlockId>& universe);

// False (not an error) for actions naming blocks outside the universe.
bool is_applicable(const State& s, const GroundedAction& a);

// Throws InapplicableAction when a precondition is missing.
State apply(const State& s, const GroundedAction& a);

std::vector<GroundedAction> applicable_actions(const State& s);

// Full goal specification: set equality.
bool is_goal(const State& s, const State& goal);

// Canonical text: one "(symbol args)" per line, lines sorted byte-wise,
// joined with '\n', no trailing newline.
std::string serialize_state(const State& s);
std::string serialize_action(const GroundedAction& a);

struct ParsedState {
  State state;
  bool consistent = false;
};

// Accepts any whitespace between propositions and tokens. Duplicate
// propositions collapse. Throws ParseError / ArityError.
ParsedState parse_state(std::string_view text);
GroundedAction parse_action(std::string_view text);

// Sequential uniform placement of a random permutation of b1..bn: each block
// goes on the table or on top of an existing stack, uniformly.
State random_initial_state(int num_blocks, Rng& rng);

}  // namespace vgplan
