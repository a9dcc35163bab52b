#ifndef EDIREF_ERRORS_HPP
#define EDIREF_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ediref {

// Error taxonomy maps onto process exit codes:
//   ConfigError -> 1, DataError (and subclasses) -> 2, RuntimeError -> 3.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& msg) : Error(msg) {}
};

// Malformed input file; `byte` is the offset reported by the parser.
class ParseError : public DataError {
 public:
  ParseError(const std::string& msg, std::size_t byte)
      : DataError(msg), byte_(byte) {}
  std::size_t byte() const { return byte_; }

 private:
  std::size_t byte_;
};

// Structurally invalid dialogue; carries the offending dialogue id.
class SchemaError : public DataError {
 public:
  SchemaError(const std::string& msg, std::string dialogue_id)
      : DataError(msg), dialogue_id_(std::move(dialogue_id)) {}
  const std::string& dialogue_id() const { return dialogue_id_; }

 private:
  std::string dialogue_id_;
};

// A string outside the closed emotion label space.
class LabelError : public DataError {
 public:
  explicit LabelError(const std::string& msg) : DataError(msg) {}
};

class RuntimeError : public Error {
 public:
  explicit RuntimeError(const std::string& msg) : Error(msg) {}
};

// NaN loss during training; names where the run died.
class DivergenceError : public RuntimeError {
 public:
  DivergenceError(const std::string& msg, int stage, int epoch, long step)
      : RuntimeError(msg), stage_(stage), epoch_(epoch), step_(step) {}
  int stage() const { return stage_; }
  int epoch() const { return epoch_; }
  long step() const { return step_; }

 private:
  int stage_;
  int epoch_;
  long step_;
};

class EndpointError : public RuntimeError {
 public:
  explicit EndpointError(const std::string& msg) : RuntimeError(msg) {}
};

}  // namespace ediref

#endif  // EDIREF_ERRORS_HPP
