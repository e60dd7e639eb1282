#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace quasipot {

enum class ErrorKind {
  Validation,
  Parse,
  Io,
  NonFinite,
  ClassificationAmbiguous,
  ChainMismatch,
  TooManyComponents,
  CaseClassificationFailed,
  VelocityVanishes,
  NonPositiveDensity,
  ThinningBoundViolated,
  HypothesisFailed,
  NumericalAssertion,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for failures of a numerical postcondition, as opposed to bad input.
  bool is_numerical() const noexcept;

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& message);

  std::size_t offset() const noexcept { return offset_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::size_t offset_;
  std::string message_;
};

}  // namespace quasipot
