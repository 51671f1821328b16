#pragma once

#include <stdexcept>
#include <string>

namespace bntune {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument to an operation (precondition violated by the caller).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file (CSV row, JSON document).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Data that parses but violates a schema or model invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A PDAG that admits no consistent DAG extension.
class InextensibleError : public Error {
 public:
  using Error::Error;
};

/// Every configuration of a tuning grid failed.
class AllConfigsFailedError : public Error {
 public:
  using Error::Error;
};

/// The out-of-bag pool of a bootstrap fold is empty.
class EmptyOutOfBagError : public Error {
 public:
  EmptyOutOfBagError(std::size_t fold, const std::string& what) : Error(what), fold_(fold) {}
  std::size_t fold() const noexcept { return fold_; }

 private:
  std::size_t fold_;
};

}  // namespace bntune
