#pragma once

#include <stdexcept>
#include <string>

namespace caerl {

/// Base class for all library errors.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shape or axis mismatch between tensors and a declared layer/op contract.
struct dim_error : error {
  using error::error;
};

/// Impossible or inconsistent static configuration (kernel sizes, head counts, ...).
struct config_error : error {
  using error::error;
};

/// Operation invoked out of order (e.g. backward without a forward cache).
struct state_error : error {
  using error::error;
};

/// Mismatched parameter collections (names or shapes differ).
struct structural_error : error {
  using error::error;
};

/// Conditioning on an observation window with zero likelihood under the prior.
struct evidence_error : error {
  using error::error;
};

/// Resource not yet filled enough to serve the request (e.g. replay buffer).
struct not_ready_error : error {
  using error::error;
};

/// API misuse at runtime (stepping a finished episode, unknown variant name, ...).
struct usage_error : error {
  using error::error;
};

/// Malformed or inconsistent input file content.
struct validation_error : error {
  using error::error;
};

}  // namespace caerl
