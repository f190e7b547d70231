#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace symentropy {

/// Base class for every domain error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyInput : public Error {
 public:
  explicit EmptyInput(const std::string& what = "empty input") : Error(what) {}
};

class UnknownSymbol : public Error {
 public:
  UnknownSymbol(std::size_t position, std::string token)
      : Error("unknown symbol '" + token + "' at position " + std::to_string(position)),
        position_(position),
        token_(std::move(token)) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& token() const noexcept { return token_; }

 private:
  std::size_t position_;
  std::string token_;
};

class InvalidLag : public Error {
 public:
  using Error::Error;
};

class InvalidLength : public Error {
 public:
  using Error::Error;
};

class DegenerateCorrelations : public Error {
 public:
  using Error::Error;
};

class MalformedFasta : public Error {
 public:
  using Error::Error;
};

class InvalidPartition : public Error {
 public:
  using Error::Error;
};

class AlphabetError : public Error {
 public:
  using Error::Error;
};

}  // namespace symentropy
