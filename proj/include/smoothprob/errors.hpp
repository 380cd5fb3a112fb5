#pragma once

#include <stdexcept>
#include <string>

namespace smoothprob {

// Resource-budget violation: a sieve limit, enumeration cap or table size
// would exceed what the caller allowed.  The CLI maps this to its own exit
// code, distinct from usage errors.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

// A numeric self-check failed harder than its pinned tolerance.
class ToleranceError : public std::runtime_error {
 public:
  explicit ToleranceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace smoothprob
