#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vqa {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or usage; aborts a whole run.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. `line` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DatasetError : public Error {
 public:
  using Error::Error;
};

/// Failure talking to a model or embedding provider.
class BackendError : public Error {
 public:
  using Error::Error;
};

/// Network-level failure that survived the retry budget.
class NetworkError : public BackendError {
 public:
  using BackendError::BackendError;
};

/// A network call was attempted while running offline.
class OfflineError : public BackendError {
 public:
  using BackendError::BackendError;
};

/// Scripted backend ran out of records or an expectation did not hold.
class ScriptError : public BackendError {
 public:
  using BackendError::BackendError;
};

/// A model response did not follow the agent's response format.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::string raw) : Error(what), raw_(std::move(raw)) {}
  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

class EmptyDecompositionError : public FormatError {
 public:
  using FormatError::FormatError;
};

class AnswerFormatError : public FormatError {
 public:
  using FormatError::FormatError;
};

class ScoreFormatError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// Rendered history exceeded the configured hard cap.
class HistoryOverflowError : public Error {
 public:
  using Error::Error;
};

}  // namespace vqa
