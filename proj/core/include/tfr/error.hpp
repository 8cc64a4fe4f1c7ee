#pragma once

#include <stdexcept>
#include <string>

namespace tfr {

// Runtime failures (I/O, malformed files, rejected configurations).
// Precondition violations on arguments throw std::invalid_argument.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tfr
