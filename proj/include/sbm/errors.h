#pragma once

#include <stdexcept>
#include <string>

namespace sbm {

// Bad input data: malformed files, values out of range, impossible states.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A request that is inconsistent with itself (incompatible flags, K > n, ...).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sbm
