#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace pedsafe {

// Base of every error the library throws. Callers that only care about
// "something in pedsafe failed" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// geometry
class InvalidSpecError : public Error { using Error::Error; };
class InvalidDepthError : public Error { using Error::Error; };
class BehindCameraError : public Error { using Error::Error; };
class InvalidTransformError : public Error { using Error::Error; };
class EmptyInputError : public Error { using Error::Error; };
class InvalidArgumentError : public Error { using Error::Error; };

// stochastic
class DomainError : public Error { using Error::Error; };
class FitError : public Error { using Error::Error; };
class PlacementError : public Error { using Error::Error; };

// world / safety
class NumericalFaultError : public Error { using Error::Error; };
class AlignmentError : public Error { using Error::Error; };
class AggregationError : public Error { using Error::Error; };

// harness
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class IoError : public Error { using Error::Error; };

}  // namespace pedsafe
