#pragma once

#include <stdexcept>
#include <string>

namespace dtfsc {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structural problem with a model (dead state, bad ids, inconsistent
/// observations, ...).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; `path()` is a JSON pointer to the offending value.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class UnknownObservationError : public Error {
 public:
  using Error::Error;
};

/// A stationary policy lacks an entry for a reachable observation.
class MissingChoiceError : public Error {
 public:
  using Error::Error;
};

/// gamma(node, z) was consulted but is not defined.
class UndefinedGammaError : public Error {
 public:
  using Error::Error;
};

/// delta(node, z, z') was consulted but is not defined.
class UndefinedDeltaError : public Error {
 public:
  using Error::Error;
};

/// A controller is not closed with respect to a model.
class ClosureError : public Error {
 public:
  using Error::Error;
};

class DatasetError : public Error {
 public:
  using Error::Error;
};

/// Input vector outside the feature layout's domains.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Controller does not have the chain shape required for skip conversion.
class ChainViolationError : public Error {
 public:
  using Error::Error;
};

class SynthesisError : public Error {
 public:
  using Error::Error;
};

}  // namespace dtfsc
