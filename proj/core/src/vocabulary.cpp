#include "vgplan/vocabulary.hpp"

#include <algorithm>

#include "vgplan/blocksworld.hpp"
#include "vgplan/errors.hpp"

namespace vgplan {

namespace {

constexpr std::string_view kGoalMarker = "GOAL:";
constexpr std::string_view kStateMarker = "STATE:";
constexpr std::string_view kActionMarker = "ACTION:";
constexpr std::string_view kNextStateMarker = "NEXT STATE:";

bool is_space(char c) { return c == ' ' || c == '\n' || c == '\t' || c == '\r'; }

}  // namespace

Vocabulary::Vocabulary(int max_blocks) {
  if (max_blocks < 1) throw ConfigError("vocabulary needs at least one block");
  tokens_ = {"<pad>", "<eos>", "<sep>", "(", ")"};
  for (auto m : {kGoalMarker, kStateMarker, kActionMarker, kNextStateMarker}) tokens_.emplace_back(m);
  for (Predicate p : {Predicate::kArmEmpty, Predicate::kClear, Predicate::kHolding, Predicate::kOn,
                      Predicate::kOnTable}) {
    tokens_.emplace_back(predicate_name(p));
  }
  for (ActionKind k : {ActionKind::kPickup, ActionKind::kPutdown, ActionKind::kStack,
                       ActionKind::kUnstack}) {
    tokens_.emplace_back(action_name(k));
  }
  for (int b = 1; b <= max_blocks; ++b) tokens_.push_back(block_name(b));
  index_tokens();
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  Vocabulary v{FromTokensTag{}};
  v.tokens_ = std::move(tokens);
  v.index_tokens();
  return v;
}

void Vocabulary::index_tokens() {
  index_.clear();
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<TokenId>(i)).second) {
      throw VersionMismatch("duplicate token '" + tokens_[i] + "' in vocabulary");
    }
  }
  for (const char* required : {"<pad>", "<eos>", "<sep>", "(", ")", "GOAL:", "STATE:", "ACTION:",
                               "NEXT STATE:"}) {
    if (!index_.count(required)) throw VersionMismatch(std::string("vocabulary lacks ") + required);
  }
  if (index_.at("<pad>") != kPad || index_.at("<eos>") != kEos || index_.at("<sep>") != kSep) {
    throw VersionMismatch("special tokens at unexpected ids");
  }
  open_ = index_.at("(");
  close_ = index_.at(")");
  goal_ = index_.at(std::string(kGoalMarker));
  state_ = index_.at(std::string(kStateMarker));
  action_ = index_.at(std::string(kActionMarker));
  next_state_ = index_.at(std::string(kNextStateMarker));
}

TokenId Vocabulary::id(std::string_view text) const {
  const auto it = index_.find(std::string(text));
  if (it == index_.end()) throw UnknownSymbol(std::string(text));
  return it->second;
}

std::uint64_t Vocabulary::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (const auto& t : tokens_) {
    for (unsigned char c : t) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  }
  return h;
}

TokenSequence tokenize(const Vocabulary& vocab, std::string_view text) {
  TokenSequence out;
  std::size_t i = 0;
  auto read_word = [&]() {
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i]) && text[i] != '(' && text[i] != ')') ++i;
    return text.substr(start, i - start);
  };
  while (i < text.size()) {
    const char c = text[i];
    if (is_space(c)) {
      ++i;
    } else if (c == '(') {
      out.push_back(vocab.open_paren());
      ++i;
    } else if (c == ')') {
      out.push_back(vocab.close_paren());
      ++i;
    } else {
      const std::string_view word = read_word();
      if (word == "NEXT") {
        std::size_t j = i;
        while (j < text.size() && (text[j] == ' ' || text[j] == '\t')) ++j;
        if (j > i && text.substr(j, kStateMarker.size()) == kStateMarker) {
          i = j + kStateMarker.size();
          out.push_back(vocab.next_state_marker());
          continue;
        }
      }
      out.push_back(vocab.id(word));
    }
  }
  return out;
}

std::string detokenize(const Vocabulary& vocab, const TokenSequence& tokens) {
  std::vector<std::string> lines;
  std::string term;
  bool in_term = false;
  auto flush = [&] {
    if (in_term) lines.push_back(term);
    term.clear();
    in_term = false;
  };
  for (TokenId t : tokens) {
    if (t == vocab.open_paren()) {
      flush();
      term = "(";
      in_term = true;
    } else if (t == vocab.close_paren()) {
      if (!in_term) {
        lines.emplace_back(")");
        continue;
      }
      term += ')';
      flush();
    } else if (vocab.is_marker(t)) {
      flush();
      if (!lines.empty()) lines.emplace_back();
      lines.push_back(vocab.text(t));
    } else if (t == Vocabulary::kPad || t == Vocabulary::kEos || t == Vocabulary::kSep) {
      flush();
      lines.push_back(vocab.text(t));
    } else if (in_term) {
      if (term.size() > 1) term += ' ';
      term += vocab.text(t);
    } else {
      lines.push_back(vocab.text(t));
    }
  }
  flush();
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

TokenSequence build_prompt(const Vocabulary& vocab, std::string_view goal_text,
                           std::string_view state_text) {
  TokenSequence out{vocab.goal_marker()};
  const auto goal = tokenize(vocab, goal_text);
  out.insert(out.end(), goal.begin(), goal.end());
  out.push_back(vocab.state_marker());
  const auto state = tokenize(vocab, state_text);
  out.insert(out.end(), state.begin(), state.end());
  return out;
}

TokenSequence build_completion(const Vocabulary& vocab, std::string_view action_text,
                               std::string_view next_state_text) {
  TokenSequence out{vocab.action_marker()};
  const auto action = tokenize(vocab, action_text);
  out.insert(out.end(), action.begin(), action.end());
  out.push_back(vocab.next_state_marker());
  const auto next = tokenize(vocab, next_state_text);
  out.insert(out.end(), next.begin(), next.end());
  out.push_back(Vocabulary::kEos);
  return out;
}

TokenSequence build_verifier_input(const Vocabulary& vocab, std::string_view state_text,
                                   std::string_view action_text) {
  TokenSequence out{vocab.state_marker()};
  const auto state = tokenize(vocab, state_text);
  out.insert(out.end(), state.begin(), state.end());
  out.push_back(vocab.action_marker());
  const auto action = tokenize(vocab, action_text);
  out.insert(out.end(), action.begin(), action.end());
  out.push_back(Vocabulary::kSep);
  return out;
}

TokenizedTransition tokenize_transition(const Vocabulary& vocab, std::string_view goal_text,
                                        std::string_view state_text, std::string_view action_text,
                                        std::string_view next_state_text, std::size_t context) {
  TokenizedTransition out;
  out.tokens = build_prompt(vocab, goal_text, state_text);
  out.prompt_length = out.tokens.size();
  const auto completion = build_completion(vocab, action_text, next_state_text);
  out.tokens.insert(out.tokens.end(), completion.begin(), completion.end());
  if (out.tokens.size() > context) {
    throw ContextOverflow("transition needs " + std::to_string(out.tokens.size()) +
                          " tokens, context is " + std::to_string(context));
  }
  return out;
}

CompletionParts split_completion(const Vocabulary& vocab, const TokenSequence& completion) {
  if (completion.empty() || completion.front() != vocab.action_marker()) {
    throw GenerationParseError("completion does not start with ACTION:");
  }
  const auto next_it = std::find(completion.begin(), completion.end(), vocab.next_state_marker());
  if (next_it == completion.end()) throw GenerationParseError("completion lacks NEXT STATE:");
  const auto eos_it = std::find(next_it, completion.end(), Vocabulary::kEos);
  if (eos_it == completion.end()) throw GenerationParseError("completion truncated before <eos>");

  auto check_body = [&](auto first, auto last, const char* section) {
    for (auto it = first; it != last; ++it) {
      if (vocab.is_marker(*it) || *it == Vocabulary::kPad || *it == Vocabulary::kSep ||
          *it == Vocabulary::kEos) {
        throw GenerationParseError(std::string("unexpected token '") + vocab.text(*it) + "' in " +
                                   section);
      }
    }
    return TokenSequence(first, last);
  };
  CompletionParts parts;
  parts.action_text = detokenize(vocab, check_body(completion.begin() + 1, next_it, "ACTION"));
  parts.next_state_text = detokenize(vocab, check_body(next_it + 1, eos_it, "NEXT STATE"));
  if (parts.action_text.empty()) throw GenerationParseError("empty ACTION section");
  return parts;
}

}  // namespace vgplan
