#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kilm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input data (XML, JSON lines, benchmark files).
class FormatError : public Error {
 public:
  using Error::Error;
};

class DumpError : public FormatError {
 public:
  DumpError(const std::string& what, std::uint64_t byte_offset)
      : FormatError(what + " at byte " + std::to_string(byte_offset)),
        byte_offset_(byte_offset) {}

  std::uint64_t byte_offset() const { return byte_offset_; }

 private:
  std::uint64_t byte_offset_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A mention or entity span does not match the text it points into.
class SpanError : public Error {
 public:
  using Error::Error;
};

class MissingKnowledgeError : public Error {
 public:
  using Error::Error;
};

// The knowledge-bearing target cannot be made to fit the length cap by
// dropping suffix tokens.
class KnowledgeTooLongError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

class ScorerError : public Error {
 public:
  using Error::Error;
};

class MetricError : public Error {
 public:
  using Error::Error;
};

}  // namespace kilm
