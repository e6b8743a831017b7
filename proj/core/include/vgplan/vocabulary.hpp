#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vgplan {

using TokenId = std::int32_t;

// Closed symbol-level vocabulary: special tokens, parentheses, section
// markers, predicate and action names, and block names b1..b<max_blocks>.
// Ids are assigned in a fixed order so that two vocabularies with the same
// max_blocks are identical.
class Vocabulary {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kEos = 1;
  static constexpr TokenId kSep = 2;

  explicit Vocabulary(int max_blocks = 8);
  // Rebuild from a persisted token list (checkpoint load).
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  const std::string& text(TokenId id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  // Throws UnknownSymbol.
  TokenId id(std::string_view text) const;
  bool contains(std::string_view text) const { return index_.count(std::string(text)) != 0; }
  const std::vector<std::string>& tokens() const { return tokens_; }

  TokenId open_paren() const { return open_; }
  TokenId close_paren() const { return close_; }
  TokenId goal_marker() const { return goal_; }
  TokenId state_marker() const { return state_; }
  TokenId action_marker() const { return action_; }
  TokenId next_state_marker() const { return next_state_; }

  bool is_marker(TokenId t) const {
    return t == goal_ || t == state_ || t == action_ || t == next_state_;
  }

  // Stable 64-bit fingerprint of the token list.
  std::uint64_t fingerprint() const;

  bool operator==(const Vocabulary& o) const { return tokens_ == o.tokens_; }

 private:
  struct FromTokensTag {};
  explicit Vocabulary(FromTokensTag) {}
  void index_tokens();

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  TokenId open_ = 0, close_ = 0, goal_ = 0, state_ = 0, action_ = 0, next_state_ = 0;
};

using TokenSequence = std::vector<TokenId>;

// Lexes text into tokens: "(" and ")" stand alone, "NEXT STATE:" is one
// token, anything else is split on whitespace. Throws UnknownSymbol.
TokenSequence tokenize(const Vocabulary& vocab, std::string_view text);

// Renders tokens back to canonical text: each parenthesized term on its own
// line, section markers on their own line with a blank line before every
// marker but the first, no trailing newline. Special tokens render as
// "<pad>", "<eos>", "<sep>".
std::string detokenize(const Vocabulary& vocab, const TokenSequence& tokens);

// GOAL: <goal> STATE: <state>
TokenSequence build_prompt(const Vocabulary& vocab, std::string_view goal_text,
                           std::string_view state_text);
// ACTION: <action> NEXT STATE: <next state> <eos>
TokenSequence build_completion(const Vocabulary& vocab, std::string_view action_text,
                               std::string_view next_state_text);
// STATE: <state> ACTION: <action> <sep>; the classifier reads the final token.
TokenSequence build_verifier_input(const Vocabulary& vocab, std::string_view state_text,
                                   std::string_view action_text);

// A tokenized generator example: prompt followed by completion.
struct TokenizedTransition {
  TokenSequence tokens;
  std::size_t prompt_length = 0;
};

// Throws ContextOverflow when prompt + completion exceed `context`.
TokenizedTransition tokenize_transition(const Vocabulary& vocab, std::string_view goal_text,
                                        std::string_view state_text, std::string_view action_text,
                                        std::string_view next_state_text, std::size_t context);

// Splits a sampled completion into (action text, next state text). Requires
// the layout ACTION: ... NEXT STATE: ... [<eos>]. Throws GenerationParseError.
struct CompletionParts {
  std::string action_text;
  std::string next_state_text;
};
CompletionParts split_completion(const Vocabulary& vocab, const TokenSequence& completion);

}  // namespace vgplan
