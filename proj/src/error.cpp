#include "quasipot/error.hpp"

namespace quasipot {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation: return "ValidationError";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Io: return "IoError";
    case ErrorKind::NonFinite: return "NonFiniteValue";
    case ErrorKind::ClassificationAmbiguous: return "ClassificationAmbiguous";
    case ErrorKind::ChainMismatch: return "ChainMismatch";
    case ErrorKind::TooManyComponents: return "TooManyComponents";
    case ErrorKind::CaseClassificationFailed: return "CaseClassificationFailed";
    case ErrorKind::VelocityVanishes: return "VelocityVanishes";
    case ErrorKind::NonPositiveDensity: return "NonPositiveDensity";
    case ErrorKind::ThinningBoundViolated: return "ThinningBoundViolated";
    case ErrorKind::HypothesisFailed: return "HypothesisFailed";
    case ErrorKind::NumericalAssertion: return "NumericalAssertion";
  }
  return "Error";
}

bool Error::is_numerical() const noexcept {
  switch (kind_) {
    case ErrorKind::Validation:
    case ErrorKind::Parse:
    case ErrorKind::Io:
    case ErrorKind::TooManyComponents:
    case ErrorKind::VelocityVanishes:
    case ErrorKind::ClassificationAmbiguous:
      return false;
    default:
      return true;
  }
}

ParseError::ParseError(std::size_t offset, const std::string& message)
    : Error(ErrorKind::Parse, "parse error at byte " + std::to_string(offset) + ": " + message),
      offset_(offset),
      message_(message) {}

}  // namespace quasipot
