// Exception taxonomy. Every failure mode the library reports deliberately has
// its own type so callers (and tests) can tell a malformed input from a
// violated call contract.
#pragma once

#include <stdexcept>
#include <string>

namespace kermit {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A required file is missing or syntactically unreadable.
struct LoadError : Error {
  using Error::Error;
};

// A file parsed, but refers to something that was never declared.
struct IntegrityError : Error {
  using Error::Error;
};

// The inverse-relation table is inconsistent (missing entry, broken involution,
// name mismatch, duplicate key).
struct RegistryError : Error {
  using Error::Error;
};

// A key lookup against an interned table failed.
struct LookupError : Error {
  using Error::Error;
};

// A caller passed an argument outside the documented domain.
struct ArgumentError : Error {
  using Error::Error;
};

// A prompt template is missing a required slot.
struct TemplateError : Error {
  using Error::Error;
};

// The generation service (or its stand-in) failed after all retries.
// Carries the query key so a rerun can resume from the failure point.
struct GenerationError : Error {
  GenerationError(const std::string& message, std::string key)
      : Error(message), query_key(std::move(key)) {}
  std::string query_key;
};

// Required data is absent at runtime (e.g. a cache entry a mode depends on).
struct DataError : Error {
  using Error::Error;
};

// A run configuration is unusable (empty query set, bad key=value file, ...).
struct ConfigError : Error {
  using Error::Error;
};

// A numeric precondition failed (zero-norm vector, non-finite score).
struct NumericError : Error {
  using Error::Error;
};

// Tensor shapes or index ranges disagree.
struct DimensionError : Error {
  using Error::Error;
};

// A training batch violates its structural contract.
struct BatchError : Error {
  using Error::Error;
};

// An API-level precondition was violated by the caller.
struct ContractError : Error {
  using Error::Error;
};

}  // namespace kermit
