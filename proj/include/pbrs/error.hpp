#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pbrs {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InversionOfZero : Error {
  InversionOfZero() : Error("inversion of zero field element") {}
};

struct DuplicateEvaluationPoint : Error {
  using Error::Error;
};

struct SingularMatrix : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct InsufficientSymbols : Error {
  using Error::Error;
};

struct CorruptStripe : Error {
  using Error::Error;
};

struct Unrecoverable : Error {
  using Error::Error;
};

struct NoPiggybackParity : Error {
  using Error::Error;
};

struct CorruptSource : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

struct PlacementInfeasible : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(const std::string& msg, std::size_t line_no)
      : Error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
  std::size_t line;
};

struct TraceInconsistent : Error {
  using Error::Error;
};

struct UnknownNode : Error {
  using Error::Error;
};

}  // namespace pbrs
