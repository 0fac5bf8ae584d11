#pragma once

#include <stdexcept>
#include <string>

namespace ilv {

// Error taxonomy; the CLI maps each family to a stable exit code.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Variant not applicable to the given shape (sv with too few memories, ss
// with a single sweep, dithered builds asked for start-vector addressing).
struct VariantError : ConfigError {
  explicit VariantError(const std::string& what) : ConfigError(what) {}
};

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// An internal invariant failed: a table that should be a permutation is not,
// lookup and start-vector addressing disagree, and the like.
struct ConsistencyError : std::runtime_error {
  explicit ConsistencyError(const std::string& what) : std::runtime_error(what) {}
};

struct MetricError : std::runtime_error {
  explicit MetricError(const std::string& what) : std::runtime_error(what) {}
};

struct AuditError : std::runtime_error {
  explicit AuditError(const std::string& what) : std::runtime_error(what) {}
};

// Training produced a non-finite loss.
struct DivergenceError : std::runtime_error {
  explicit DivergenceError(const std::string& what, unsigned epoch_)
      : std::runtime_error(what), epoch(epoch_) {}
  unsigned epoch;
};

}  // namespace ilv
