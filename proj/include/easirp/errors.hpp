#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace easirp {

// Bad argument values or mismatched dimensions at a call site.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Inconsistent configuration (mode/flag contradictions, invalid dimension chains).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed CSV input. Carries the 1-based line number when known (0 otherwise).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// An adaptive update produced non-finite entries.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t sample_index, std::size_t epoch)
      : std::runtime_error("separation matrix diverged at sample " + std::to_string(sample_index) +
                           " (epoch " + std::to_string(epoch) + ")"),
        sample_index_(sample_index),
        epoch_(epoch) {}
  std::size_t sample_index() const noexcept { return sample_index_; }
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t sample_index_;
  std::size_t epoch_;
};

// Model file violates the schema or is internally inconsistent.
class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A diagnostic metric is undefined for its input (e.g. singular global matrix).
class DiagnosticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace easirp
