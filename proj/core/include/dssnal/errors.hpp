#pragma once

#include <stdexcept>
#include <string>

namespace dssnal {

/// A non-finite value (NaN or infinity) crossed a kernel boundary.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A scalar parameter is outside its admissible range.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid graph or gossip-matrix request (bad size, disconnected input, ...).
class TopologyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Misuse of the message-passing layer (payload dimension mismatch, ...).
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value needed from a neighbor was never exchanged.
class IncompleteExchangeError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

/// An oracle of one problem family was invoked on an instance of another.
class FamilyMismatchError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Dataset content violates the family contract (bad labels, empty data, ...).
class DataError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input file; carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, long line = 0)
      : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

/// A cached quantity was consumed after the point it was computed at changed.
class StalenessError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The budgeted momentum solve missed its certified residual target.
class BudgetMissError : public std::runtime_error {
 public:
  BudgetMissError(double measured_ratio, double target_ratio)
      : std::runtime_error("direction residual ratio " + std::to_string(measured_ratio) +
                           " exceeds target " + std::to_string(target_ratio)),
        measured_(measured_ratio),
        target_(target_ratio) {}
  double measured_ratio() const { return measured_; }
  double target_ratio() const { return target_; }

 private:
  double measured_;
  double target_;
};

}  // namespace dssnal
