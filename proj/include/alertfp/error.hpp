#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace alertfp {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Column layout problems: field-count mismatch, bad schema config, fingerprint gate.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// The alerts' schema differs from the one a classifier model was trained on.
class FingerprintMismatchError : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

/// A value or line that cannot be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class EmptyDatasetError : public Error {
 public:
  EmptyDatasetError() : Error("no valid alert records in input") {}
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Mining stopped because the pattern count passed the configured cap.
class PatternExplosionError : public Error {
 public:
  PatternExplosionError(std::size_t level, std::size_t count, std::size_t cap)
      : Error("pattern count " + std::to_string(count) + " exceeded cap " + std::to_string(cap) +
              " while mining level " + std::to_string(level) +
              "; raise the minisupport or the --max-patterns cap"),
        level_(level),
        count_(count) {}

  std::size_t level() const noexcept { return level_; }
  std::size_t count() const noexcept { return count_; }

 private:
  std::size_t level_;
  std::size_t count_;
};

/// FPOF is undefined over an empty pattern set.
class EmptyPatternSetError : public Error {
 public:
  EmptyPatternSetError() : Error("pattern set is empty; FPOF is undefined (lower the minisupport)") {}
};

/// Refusal of the brute-force oracle when the itemset lattice is too large.
class OracleGuardError : public Error {
 public:
  using Error::Error;
};

/// Classifier model file problems: version mismatch, corrupted line, invariant breach.
class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace alertfp
