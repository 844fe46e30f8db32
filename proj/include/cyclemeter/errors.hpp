#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace cyclemeter {

/// Base of every error raised by the library. Callers that only need a
/// message catch this; tests and the CLI catch the concrete types.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedRow : public Error {
 public:
  MalformedRow(std::size_t line, const std::string& why)
      : Error("malformed row at line " + std::to_string(line) + ": " + why), line_(line) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DuplicateTimestamp : public Error {
 public:
  DuplicateTimestamp(std::string load_id, const std::string& timestamp)
      : Error("duplicate timestamp " + timestamp + " for load '" + load_id + "'"), load_id_(std::move(load_id)) {}
  [[nodiscard]] const std::string& load_id() const noexcept { return load_id_; }

 private:
  std::string load_id_;
};

class EmptyInput : public Error {
 public:
  EmptyInput() : Error("meter input contains no data rows") {}
};

class DuplicateLoadId : public Error {
 public:
  explicit DuplicateLoadId(const std::string& id) : Error("duplicate load_id '" + id + "'") {}
};

class MissingField : public Error {
 public:
  explicit MissingField(std::string field) : Error("missing or invalid field '" + field + "'"), field_(std::move(field)) {}
  [[nodiscard]] const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class InvalidBand : public Error {
 public:
  InvalidBand(double lower, double upper)
      : Error("invalid tolerance band [" + std::to_string(lower) + ", " + std::to_string(upper) + "]") {}
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class UnknownLoad : public Error {
 public:
  explicit UnknownLoad(std::string id) : Error("unknown load '" + id + "'"), load_id_(std::move(id)) {}
  [[nodiscard]] const std::string& load_id() const noexcept { return load_id_; }

 private:
  std::string load_id_;
};

class UnresolvedThreshold : public Error {
 public:
  explicit UnresolvedThreshold(const std::string& id)
      : Error("fractional ON threshold for load '" + id + "' needs rated_power_kw") {}
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class EmptyCycleList : public Error {
 public:
  EmptyCycleList() : Error("cycle list is empty") {}
};

class ZeroCycles : public Error {
 public:
  explicit ZeroCycles(const std::string& id) : Error("load '" + id + "' has zero cycles") {}
};

class InfeasibleProfile : public Error {
 public:
  using Error::Error;
};

class NoMatchingLoads : public Error {
 public:
  NoMatchingLoads() : Error("no meter series matches a configured load") {}
};

}  // namespace cyclemeter
