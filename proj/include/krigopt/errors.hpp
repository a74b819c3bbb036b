#pragma once

#include <stdexcept>
#include <string>

namespace krigopt {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};
struct InvalidParameter : Error {
  using Error::Error;
};
struct NotPositiveDefinite : Error {
  using Error::Error;
};
struct DegenerateDesign : Error {
  using Error::Error;
};
struct DuplicatePoints : Error {
  using Error::Error;
};
struct DegenerateData : Error {
  using Error::Error;
};
struct RankDeficient : Error {
  using Error::Error;
};
struct InsufficientPoints : Error {
  using Error::Error;
};
struct DegenerateAbscissae : Error {
  using Error::Error;
};
struct NonPhysical : Error {
  using Error::Error;
};
struct OutOfDomain : Error {
  using Error::Error;
};
struct InvalidConfig : Error {
  using Error::Error;
};
struct NonFiniteValue : Error {
  using Error::Error;
};

// Ask/tell sequencing violations (CLI exit code 3).
struct ProtocolError : Error {
  using Error::Error;
};
struct MismatchedTell : ProtocolError {
  using ProtocolError::ProtocolError;
};
struct BudgetExhausted : ProtocolError {
  using ProtocolError::ProtocolError;
};

}  // namespace krigopt
