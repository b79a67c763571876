#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace quakemodes {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// An NDK block that cannot be parsed. Carries the 1-based line number of the
// first line of the offending block.
class MalformedBlock : public Error {
 public:
  MalformedBlock(std::size_t line, const std::string& what)
      : Error("malformed block at line " + std::to_string(line) + ": " + what),
        line_number(line) {}
  std::size_t line_number;
};

class EmptyClass : public Error {
 public:
  explicit EmptyClass(const std::string& msg) : Error(msg) {}
};

class EmptyDirection : public Error {
 public:
  explicit EmptyDirection(const std::string& msg) : Error(msg) {}
};

class TooFewSamples : public Error {
 public:
  explicit TooFewSamples(const std::string& msg) : Error(msg) {}
};

class SeriesTooShort : public Error {
 public:
  explicit SeriesTooShort(const std::string& msg) : Error(msg) {}
};

class LengthMismatch : public Error {
 public:
  explicit LengthMismatch(const std::string& msg) : Error(msg) {}
};

class OutOfRange : public Error {
 public:
  explicit OutOfRange(const std::string& msg) : Error(msg) {}
};

class OverlappingRegions : public Error {
 public:
  explicit OverlappingRegions(const std::string& msg) : Error(msg) {}
};

class TooLongForExact : public Error {
 public:
  explicit TooLongForExact(const std::string& msg) : Error(msg) {}
};

class EmptyInput : public Error {
 public:
  explicit EmptyInput(const std::string& msg) : Error(msg) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace quakemodes
