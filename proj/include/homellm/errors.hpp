#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The homellm Authors

#include <stdexcept>
#include <string>

namespace homellm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// House or scenario file failed to load or validate.
class LoadError : public Error {
 public:
  using Error::Error;
};

/// A decision outcome could not be applied to a house snapshot.
class ApplyError : public Error {
 public:
  using Error::Error;
};

/// Unknown user or otherwise invalid request to the action builder.
class BuildError : public Error {
 public:
  using Error::Error;
};

/// Preference file line could not be parsed.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Embedding backend failure.
class RetrievalError : public Error {
 public:
  using Error::Error;
};

/// Caller broke a documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class AggregationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace homellm
