#pragma once

#include <stdexcept>
#include <string>

namespace dmgt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DMGT_ERROR(Name)                  \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  };

DMGT_ERROR(DomainViolation)
DMGT_ERROR(SingularHessian)
DMGT_ERROR(NotInImage)
DMGT_ERROR(SingularMatrix)
DMGT_ERROR(ModeMismatch)
DMGT_ERROR(SamplingExhausted)
DMGT_ERROR(PreconditionViolated)
DMGT_ERROR(Disconnected)
DMGT_ERROR(DisconnectedAfterRetries)
DMGT_ERROR(DegenerateRow)
DMGT_ERROR(ValidationError)
DMGT_ERROR(AllDiverged)

#undef DMGT_ERROR

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class StepError : public Error {
 public:
  StepError(const std::string& what, int iteration)
      : Error("iteration " + std::to_string(iteration) + ": " + what), iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

}  // namespace dmgt
