//
// Project moldream - Copyright 2026 The moldream Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLDREAM_ERROR_H_
#define MOLDREAM_ERROR_H_

#include <stdexcept>
#include <string>

namespace moldream {

/// Base of every error raised by the library. Callers that only need to
/// distinguish "bad input data" from programming errors catch this type.
class Error: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SmilesError: public Error {
public:
  enum class Kind {
    kUnsupportedFeature,
    kSyntax,
    kUnclosedRing,
    kValenceExceeded,
  };

  SmilesError(Kind kind, const std::string &msg)
      : Error(msg), kind_(kind) { }

  Kind kind() const noexcept { return kind_; }

private:
  Kind kind_;
};

const char *to_string(SmilesError::Kind kind);

class ValidationError: public Error {
public:
  using Error::Error;
};

class EncodingError: public Error {
public:
  enum class Kind {
    kTooLong,
    kUnencodable,
  };

  EncodingError(Kind kind, const std::string &msg)
      : Error(msg), kind_(kind) { }

  Kind kind() const noexcept { return kind_; }

private:
  Kind kind_;
};

const char *to_string(EncodingError::Kind kind);

class TokenParseError: public Error {
public:
  using Error::Error;
};

class EmptyInputError: public Error {
public:
  using Error::Error;
};

class NumericError: public Error {
public:
  using Error::Error;
};

class ShapeMismatchError: public Error {
public:
  using Error::Error;
};

class DegenerateLabelsError: public Error {
public:
  using Error::Error;
};

class NotOneHotError: public Error {
public:
  using Error::Error;
};

class BadRangeError: public Error {
public:
  using Error::Error;
};

class ConfigError: public Error {
public:
  using Error::Error;
};

class IoError: public Error {
public:
  using Error::Error;
};

class LookupError: public Error {
public:
  using Error::Error;
};

}  // namespace moldream

#endif  // MOLDREAM_ERROR_H_
