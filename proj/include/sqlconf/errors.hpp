#pragma once

#include <stdexcept>
#include <string>

namespace sqlconf {

// Base class for all framework errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A caller violated a documented precondition (dimension mismatch, missing
// verdicts, bad config).
class ContractError : public Error {
 public:
  using Error::Error;
};

// SQL could not be executed (syntax error, unknown table, non-read statement).
class SqlError : public Error {
 public:
  using Error::Error;
};

// A file could not be parsed; carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, long line = -1)
      : Error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

// Prompt template problems: unknown template or unresolved placeholder.
class TemplateError : public Error {
 public:
  using Error::Error;
};

// Network-level failure after retries were exhausted.
class TransportError : public Error {
 public:
  using Error::Error;
};

// The remote backend answered with a non-success status.
class BackendError : public Error {
 public:
  BackendError(int status, const std::string& body)
      : Error("backend returned status " + std::to_string(status) + ": " +
              body.substr(0, 200)),
        status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

// A confidence response stayed unparseable after the allowed re-asks.
class ScoringError : public Error {
 public:
  using Error::Error;
};

// A metric has no defined value (e.g. AUROC with one-sided labels).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

// The template pool cannot supply the requested number of bank entries.
class CapacityError : public Error {
 public:
  using Error::Error;
};

}  // namespace sqlconf
