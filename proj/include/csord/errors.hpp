#pragma once

#include <stdexcept>
#include <string>

namespace csord {

// Base type for everything the toolkit throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidDimensionError : Error {
  using Error::Error;
};

// A confusion row with zero count sum cannot be normalized.
struct ZeroRowError : Error {
  int grade;
  explicit ZeroRowError(int g)
      : Error("confusion row for grade " + std::to_string(g) +
              " has zero count sum"),
        grade(g) {}
};

struct InvalidHyperparameterError : Error {
  using Error::Error;
};

struct InvalidInputError : Error {
  using Error::Error;
};

struct EmptyInputError : Error {
  using Error::Error;
};

// A metric that has no defined value on the given data (constant
// sequences, fewer than two present classes, ...).
struct UndefinedStatisticError : Error {
  using Error::Error;
};

// Too many bootstrap resamples had an undefined metric.
struct UnstableStatisticError : Error {
  using Error::Error;
};

struct TrainingDivergedError : Error {
  int epoch;
  int batch;
  TrainingDivergedError(int e, int b)
      : Error("training diverged (non-finite loss) at epoch " +
              std::to_string(e) + ", batch " + std::to_string(b)),
        epoch(e),
        batch(b) {}
};

// CSV / config parse failure; line numbers are 1-based.
struct ParseError : Error {
  int line;
  ParseError(const std::string& what, int line_number)
      : Error("line " + std::to_string(line_number) + ": " + what),
        line(line_number) {}
};

}  // namespace csord
