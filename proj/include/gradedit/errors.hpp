#pragma once

#include <stdexcept>
#include <string>

namespace gradedit {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Dimension / shape / length mismatches.
struct ShapeError : Error {
  using Error::Error;
};

// Invalid configuration or parameter value (nonpositive radius, empty
// keyword set, bad strategy tag, ...).
struct ParamError : Error {
  using Error::Error;
};

// Token id outside the vocabulary, or unknown word.
struct VocabError : Error {
  using Error::Error;
};

// Empty or unusable input data (empty corpus, empty prompt list).
struct DataError : Error {
  using Error::Error;
};

// Malformed file contents. Carries the byte offset where parsing failed.
struct FormatError : Error {
  FormatError(const std::string& msg, std::size_t offset)
      : Error(msg + " (at byte offset " + std::to_string(offset) + ")"),
        byte_offset(offset) {}
  std::size_t byte_offset;
};

// Wrong magic bytes or unsupported format version.
struct VersionError : Error {
  using Error::Error;
};

// Objective evaluation produced a non-finite value.
struct EvalError : Error {
  using Error::Error;
};

// Input is degenerate for the requested operation (e.g. zero activation).
struct DegenerateInputError : Error {
  using Error::Error;
};

// Index out of range (layer index, row index, ...).
struct IndexError : Error {
  using Error::Error;
};

}  // namespace gradedit
