#include "vgplan/blocksworld.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <set>

#include "vgplan/errors.hpp"

namespace vgplan {

std::string block_name(BlockId id) { return "b" + std::to_string(id); }

int arity(Predicate p) {
  switch (p) {
    case Predicate::kArmEmpty:
      return 0;
    case Predicate::kOn:
      return 2;
    default:
      return 1;
  }
}

std::string_view predicate_name(Predicate p) {
  switch (p) {
    case Predicate::kArmEmpty:
      return "arm-empty";
    case Predicate::kClear:
      return "clear";
    case Predicate::kHolding:
      return "holding";
    case Predicate::kOn:
      return "on";
    case Predicate::kOnTable:
      return "on-table";
  }
  return "?";
}

std::optional<Predicate> predicate_from_name(std::string_view name) {
  for (Predicate p : {Predicate::kArmEmpty, Predicate::kClear, Predicate::kHolding,
                      Predicate::kOn, Predicate::kOnTable}) {
    if (predicate_name(p) == name) return p;
  }
  return std::nullopt;
}

std::string Proposition::to_string() const {
  std::string out = "(";
  out += predicate_name(symbol);
  for (int i = 0; i < arity(symbol); ++i) {
    out += ' ';
    out += block_name(args[i]);
  }
  out += ')';
  return out;
}

namespace {

std::vector<BlockId> blocks_of(const std::vector<Proposition>& props) {
  std::vector<BlockId> out;
  for (const auto& p : props) {
    for (int i = 0; i < arity(p.symbol); ++i) out.push_back(p.args[i]);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void normalize(std::vector<Proposition>& props) {
  std::sort(props.begin(), props.end());
  props.erase(std::unique(props.begin(), props.end()), props.end());
}

}  // namespace

State::State(std::vector<Proposition> props) : props_(std::move(props)) {
  normalize(props_);
  universe_ = blocks_of(props_);
}

State::State(std::vector<Proposition> props, std::vector<BlockId> universe)
    : props_(std::move(props)), universe_(std::move(universe)) {
  normalize(props_);
  std::sort(universe_.begin(), universe_.end());
  universe_.erase(std::unique(universe_.begin(), universe_.end()), universe_.end());
}

bool State::contains(const Proposition& p) const {
  return std::binary_search(props_.begin(), props_.end(), p);
}

bool State::in_universe(BlockId b) const {
  return std::binary_search(universe_.begin(), universe_.end(), b);
}

std::optional<std::string> consistency_violation(const State& s) {
  std::map<BlockId, int> supports;       // on-table / on / holding count per block
  std::map<BlockId, BlockId> below;      // x -> y for on(x, y)
  std::map<BlockId, int> above_count;    // y -> #x with on(x, y)
  std::set<BlockId> clear, held;
  int arm_empty = 0;

  for (const auto& p : s.props()) {
    for (int i = 0; i < arity(p.symbol); ++i) {
      if (!s.in_universe(p.args[i])) return "block outside universe in " + p.to_string();
    }
    switch (p.symbol) {
      case Predicate::kArmEmpty:
        ++arm_empty;
        break;
      case Predicate::kClear:
        clear.insert(p.args[0]);
        break;
      case Predicate::kHolding:
        held.insert(p.args[0]);
        ++supports[p.args[0]];
        break;
      case Predicate::kOnTable:
        ++supports[p.args[0]];
        break;
      case Predicate::kOn:
        if (p.args[0] == p.args[1]) return "block on itself: " + p.to_string();
        ++supports[p.args[0]];
        below[p.args[0]] = p.args[1];
        ++above_count[p.args[1]];
        break;
    }
  }

  if (arm_empty + static_cast<int>(held.size()) != 1) {
    return "arm must be empty or hold exactly one block";
  }
  for (BlockId b : s.universe()) {
    const auto it = supports.find(b);
    if (it == supports.end() || it->second != 1) {
      return "block " + block_name(b) + " must be on the table, on one block, or held";
    }
  }
  for (const auto& [y, n] : above_count) {
    if (n > 1) return "more than one block on " + block_name(y);
  }
  for (const auto& [x, y0] : below) {
    BlockId y = y0;
    std::size_t steps = 0;
    while (true) {
      if (y == x) return "cycle in on-relation through " + block_name(x);
      const auto it = below.find(y);
      if (it == below.end() || ++steps > below.size()) break;
      y = it->second;
    }
  }
  for (BlockId b : s.universe()) {
    const bool should_be_clear = above_count.count(b) == 0 && held.count(b) == 0;
    if (should_be_clear != (clear.count(b) == 1)) {
      return "clear(" + block_name(b) + ") disagrees with the stacking";
    }
  }
  return std::nullopt;
}

int param_count(ActionKind k) {
  return (k == ActionKind::kStack || k == ActionKind::kUnstack) ? 2 : 1;
}

std::string_view action_name(ActionKind k) {
  switch (k) {
    case ActionKind::kPickup:
      return "pickup";
    case ActionKind::kPutdown:
      return "putdown";
    case ActionKind::kStack:
      return "stack";
    case ActionKind::kUnstack:
      return "unstack";
  }
  return "?";
}

std::optional<ActionKind> action_from_name(std::string_view name) {
  for (ActionKind k : {ActionKind::kPickup, ActionKind::kPutdown, ActionKind::kStack,
                       ActionKind::kUnstack}) {
    if (action_name(k) == name) return k;
  }
  return std::nullopt;
}

ActionEffects effects(const GroundedAction& a) {
  using P = Proposition;
  const BlockId x = a.args[0];
  const BlockId y = a.args[1];
  switch (a.kind) {
    case ActionKind::kPickup:
      return {{P::on_table(x), P::clear(x), P::arm_empty()},
              {P::holding(x)},
              {P::on_table(x), P::clear(x), P::arm_empty()}};
    case ActionKind::kPutdown:
      return {{P::holding(x)},
              {P::on_table(x), P::clear(x), P::arm_empty()},
              {P::holding(x)}};
    case ActionKind::kStack:
      return {{P::holding(x), P::clear(y)},
              {P::on(x, y), P::clear(x), P::arm_empty()},
              {P::holding(x), P::clear(y)}};
    case ActionKind::kUnstack:
      return {{P::on(x, y), P::clear(x), P::arm_empty()},
              {P::holding(x), P::clear(y)},
              {P::on(x, y), P::clear(x), P::arm_empty()}};
  }
  return {};
}

std::vector<GroundedAction> ground_all_actions(const std::vector<BlockId>& universe) {
  std::vector<GroundedAction> out;
  out.reserve(2 * universe.size() * universe.size());
  for (BlockId x : universe) {
    out.push_back(GroundedAction::pickup(x));
    out.push_back(GroundedAction::putdown(x));
  }
  for (BlockId x : universe) {
    for (BlockId y : universe) {
      if (x == y) continue;
      out.push_back(GroundedAction::stack(x, y));
      out.push_back(GroundedAction::unstack(x, y));
    }
  }
  return out;
}

bool is_applicable(const State& s, const GroundedAction& a) {
  for (int i = 0; i < param_count(a.kind); ++i) {
    if (!s.in_universe(a.args[i])) return false;
  }
  if (param_count(a.kind) == 2 && a.args[0] == a.args[1]) return false;
  const auto eff = effects(a);
  return std::all_of(eff.pre.begin(), eff.pre.end(),
                     [&](const Proposition& p) { return s.contains(p); });
}

State apply(const State& s, const GroundedAction& a) {
  if (!is_applicable(s, a)) {
    throw InapplicableAction(serialize_action(a) + " is not applicable");
  }
  const auto eff = effects(a);
  std::vector<Proposition> next;
  next.reserve(s.size() + eff.add.size());
  for (const auto& p : s.props()) {
    if (std::find(eff.del.begin(), eff.del.end(), p) == eff.del.end()) next.push_back(p);
  }
  next.insert(next.end(), eff.add.begin(), eff.add.end());
  return State(std::move(next), s.universe());
}

std::vector<GroundedAction> applicable_actions(const State& s) {
  std::vector<GroundedAction> out;
  for (const auto& a : ground_all_actions(s.universe())) {
    if (is_applicable(s, a)) out.push_back(a);
  }
  return out;
}

bool is_goal(const State& s, const State& goal) { return s.props() == goal.props(); }

std::string serialize_state(const State& s) {
  std::vector<std::string> lines;
  lines.reserve(s.size());
  for (const auto& p : s.props()) lines.push_back(p.to_string());
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

std::string serialize_action(const GroundedAction& a) {
  std::string out = "(";
  out += action_name(a.kind);
  for (int i = 0; i < param_count(a.kind); ++i) {
    out += ' ';
    out += block_name(a.args[i]);
  }
  out += ')';
  return out;
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\n' || c == '\t' || c == '\r'; }

// One parenthesized term: a head word and its arguments.
struct Term {
  std::string head;
  std::vector<BlockId> args;
  std::size_t offset = 0;
};

class TermReader {
 public:
  explicit TermReader(std::string_view text) : text_(text) {}

  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }
  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }
  std::size_t pos() const { return pos_; }

  Term read_term() {
    skip_space();
    Term t;
    t.offset = pos_;
    if (pos_ >= text_.size() || text_[pos_] != '(') throw ParseError("expected '('", pos_);
    ++pos_;
    skip_space();
    const std::size_t head_at = pos_;
    t.head = read_word();
    if (t.head.empty()) throw ParseError("expected a symbol", head_at);
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) throw ParseError("unterminated term", pos_);
      if (text_[pos_] == ')') {
        ++pos_;
        return t;
      }
      const std::size_t arg_at = pos_;
      const std::string word = read_word();
      if (word.empty()) throw ParseError("unexpected character", arg_at);
      t.args.push_back(parse_block(word, arg_at));
    }
  }

 private:
  std::string read_word() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_]) && text_[pos_] != '(' &&
           text_[pos_] != ')') {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  static BlockId parse_block(const std::string& word, std::size_t at) {
    if (word.size() < 2 || word[0] != 'b' || word.size() > 10) {
      throw ParseError("malformed block name '" + word + "'", at);
    }
    BlockId id = 0;
    for (std::size_t i = 1; i < word.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(word[i]))) {
        throw ParseError("malformed block name '" + word + "'", at);
      }
      id = id * 10 + (word[i] - '0');
    }
    if (id < 1 || word[1] == '0') throw ParseError("malformed block name '" + word + "'", at);
    return id;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

ParsedState parse_state(std::string_view text) {
  TermReader reader(text);
  std::vector<Proposition> props;
  while (!reader.at_end()) {
    const Term t = reader.read_term();
    const auto sym = predicate_from_name(t.head);
    if (!sym) throw ParseError("unknown predicate '" + t.head + "'", t.offset);
    if (static_cast<int>(t.args.size()) != arity(*sym)) {
      throw ArityError("predicate '" + t.head + "' takes " + std::to_string(arity(*sym)) +
                       " arguments, got " + std::to_string(t.args.size()));
    }
    Proposition p{*sym, {0, 0}};
    for (std::size_t i = 0; i < t.args.size(); ++i) p.args[i] = t.args[i];
    props.push_back(p);
  }
  ParsedState out{State(std::move(props)), false};
  out.consistent = is_consistent(out.state);
  return out;
}

GroundedAction parse_action(std::string_view text) {
  TermReader reader(text);
  if (reader.at_end()) throw ParseError("empty action", reader.pos());
  const Term t = reader.read_term();
  if (!reader.at_end()) throw ParseError("trailing text after action", reader.pos());
  const auto kind = action_from_name(t.head);
  if (!kind) throw ParseError("unknown action '" + t.head + "'", t.offset);
  if (static_cast<int>(t.args.size()) != param_count(*kind)) {
    throw ArityError("action '" + t.head + "' takes " + std::to_string(param_count(*kind)) +
                     " arguments, got " + std::to_string(t.args.size()));
  }
  GroundedAction a{*kind, {0, 0}};
  for (std::size_t i = 0; i < t.args.size(); ++i) a.args[i] = t.args[i];
  return a;
}

State random_initial_state(int num_blocks, Rng& rng) {
  std::vector<BlockId> order(static_cast<std::size_t>(num_blocks));
  std::iota(order.begin(), order.end(), 1);
  rng.shuffle(order);

  std::vector<std::vector<BlockId>> stacks;
  for (BlockId b : order) {
    const auto choice = rng.uniform_below(stacks.size() + 1);
    if (choice == stacks.size()) {
      stacks.push_back({b});
    } else {
      stacks[choice].push_back(b);
    }
  }

  std::vector<Proposition> props{Proposition::arm_empty()};
  for (const auto& stack : stacks) {
    props.push_back(Proposition::on_table(stack.front()));
    for (std::size_t i = 1; i < stack.size(); ++i) {
      props.push_back(Proposition::on(stack[i], stack[i - 1]));
    }
    props.push_back(Proposition::clear(stack.back()));
  }
  std::vector<BlockId> universe(order.begin(), order.end());
  return State(std::move(props), std::move(universe));
}

}  // namespace vgplan
