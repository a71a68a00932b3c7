#pragma once

#include <stdexcept>
#include <string>

namespace qarb {

// Base class for every domain error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input is structurally valid but carries no usable information
// (zero vector, zero matrix, empty pool, zero-variance series).
class DegenerateInput : public Error {
 public:
  explicit DegenerateInput(const std::string& what) : Error(what) {}
};

// Dimension / shape / index mismatch.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error(what) {}
};

// Matrix has an exactly-zero singular value (distinct from merely large kappa).
class RankDeficient : public Error {
 public:
  explicit RankDeficient(const std::string& what) : Error(what) {}
};

// Every phase-estimation readout was exactly zero: the input state is
// inconsistent with the embedding (pure null-space overlap).
class NullSpectrumAnomaly : public Error {
 public:
  explicit NullSpectrumAnomaly(const std::string& what) : Error(what) {}
};

// Cascade stages invoked out of order.
class ProtocolViolation : public Error {
 public:
  explicit ProtocolViolation(const std::string& what) : Error(what) {}
};

// Malformed input file; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Timestamps out of order.
class OrderError : public Error {
 public:
  explicit OrderError(const std::string& what) : Error(what) {}
};

// Parameter outside its valid range.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

// Persisted document has a missing or incompatible schema version.
class VersionError : public Error {
 public:
  explicit VersionError(const std::string& what) : Error(what) {}
};

}  // namespace qarb
