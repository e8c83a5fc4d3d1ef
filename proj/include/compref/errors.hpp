/*
 * errors.hpp
 *
 * Exception types shared across the library.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace compref {

/* a queried point lies outside the partitioned domain */
struct OutOfDomain : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* a trajectory left the guard region during integration */
struct DivergedTrajectory : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* a symbol was used with a specification cell that does not contain it */
struct SymbolOutsideCell : std::logic_error {
  using std::logic_error::logic_error;
};

/* partitions passed to compose() do not share the same domain on common dims */
struct DomainMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* declared monotonicity signs contradict the sampled vector field */
struct MonotonicityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* run-configuration file is malformed or self-inconsistent */
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace compref
