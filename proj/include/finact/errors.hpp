#pragma once

#include <stdexcept>
#include <string>

namespace finact {

// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The fin magnet touched (or came within the guard distance of) a magnet.
class SingularityError : public Error {
 public:
  using Error::Error;
};

// An argument lies outside the domain where the model is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

// The requested configuration is not supported (e.g. energy for alpha != 4).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// The sign-change scan could not bracket the roots it was asked to find.
class IncompleteScanError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent scenario configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Reading or writing a file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace finact
