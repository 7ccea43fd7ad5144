#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace inertia {

// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes or counts that do not fit together.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Non-finite values, divergent training.
class NumericError : public Error {
 public:
  using Error::Error;
};

// API called in the wrong order (e.g. backward before forward).
class UsageError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

// Well-formed input whose content violates an invariant (e.g. time going backwards).
class DataError : public Error {
 public:
  using Error::Error;
};

// Ground truth does not span the requested timestamps.
class CoverageError : public Error {
 public:
  using Error::Error;
};

class DegenerateChannelError : public Error {
 public:
  DegenerateChannelError(std::size_t channel, const std::string& channel_name, const std::string& why)
      : Error("degenerate channel " + channel_name + " (index " + std::to_string(channel) + "): " + why),
        channel_(channel),
        channel_name_(channel_name) {}

  std::size_t channel() const noexcept { return channel_; }
  const std::string& channel_name() const noexcept { return channel_name_; }

 private:
  std::size_t channel_;
  std::string channel_name_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Wraps an error raised inside one pipeline stage of an experiment run.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace inertia
