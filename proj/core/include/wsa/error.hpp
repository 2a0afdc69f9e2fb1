#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wsa {

// Root of every exception the engine throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector or row lengths disagree with the geometry they belong to.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A caller-supplied argument violates an operation precondition.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// An index falls outside its valid range.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Input values are unusable (NaN/Inf, broken invariants, missing ground truth).
class DataError : public Error {
 public:
  using Error::Error;
};

// The GMM cannot be fit because the input has no spread.
class DegenerateInputError : public DataError {
 public:
  using DataError::DataError;
};

// The density crossover has no root strictly between the two means.
class CrossoverMissError : public Error {
 public:
  using Error::Error;
};

// Malformed bundle or JSON file. Carries the byte offset where decoding failed
// (npos when the failure is not tied to a position).
class FormatError : public Error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  explicit FormatError(const std::string& what, std::size_t offset = npos)
      : Error(offset == npos ? what : what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnsupportedVersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

// Filesystem failure (open, read, write).
class FileError : public Error {
 public:
  using Error::Error;
};

}  // namespace wsa
