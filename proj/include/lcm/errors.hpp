#ifndef LCM_ERRORS_HPP
#define LCM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lcm {

// Bad user-supplied data: malformed model files, out-of-range indices,
// preconditions the caller can fix. The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Violated internal invariant (an identity the implementation guarantees
// failed to hold). The CLI maps uncaught logic_errors to exit code 3.
using InternalError = std::logic_error;

}  // namespace lcm

#endif
