#pragma once

#include <stdexcept>
#include <string>

namespace spinnet {

// Register/qubit-count capacity exceeded.
struct CapacityError : std::length_error {
  using std::length_error::length_error;
};

// A Bell pair was used after being consumed.
struct ConsumedPairError : std::logic_error {
  using std::logic_error::logic_error;
};

// A heralded link gave up after its attempt budget.
struct TimeoutError : std::runtime_error {
  TimeoutError(const std::string& what, long long attempts, double elapsed_ns)
      : std::runtime_error(what), attempts(attempts), elapsed_ns(elapsed_ns) {}
  long long attempts;
  double elapsed_ns;
};

}  // namespace spinnet
