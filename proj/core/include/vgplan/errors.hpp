#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace vgplan {

// Base of every error thrown by the library. Commands map subclasses to exit
// codes, so keep the hierarchy flat and the names stable.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class ArityError : public Error {
 public:
  using Error::Error;
};

class InapplicableAction : public Error {
 public:
  using Error::Error;
};

class UnknownSymbol : public Error {
 public:
  explicit UnknownSymbol(std::string lexeme)
      : Error("unknown symbol: " + lexeme), lexeme_(std::move(lexeme)) {}
  const std::string& lexeme() const { return lexeme_; }

 private:
  std::string lexeme_;
};

class ContextOverflow : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

// A loss was requested over a batch in which no position is counted.
class EmptyLossMask : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  DecodeError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class VersionMismatch : public Error {
 public:
  using Error::Error;
};

class ChecksumError : public Error {
 public:
  using Error::Error;
};

class EmptyActionPool : public Error {
 public:
  using Error::Error;
};

class GenerationParseError : public Error {
 public:
  using Error::Error;
};

class MissingArtifact : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class FixtureMismatch : public Error {
 public:
  FixtureMismatch(const std::string& what, int transition)
      : Error(what), transition_(transition) {}
  // 1-based index of the first divergent transition.
  int transition() const { return transition_; }

 private:
  int transition_;
};

}  // namespace vgplan
