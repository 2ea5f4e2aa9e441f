#pragma once

#include <stdexcept>
#include <string>

namespace selmask {

// Bad flags, unreadable tokenizer config, invalid parameter values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Missing files, malformed records, duplicate ids, files that violate a
// schema or a value invariant.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A postcondition of our own code did not hold.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace selmask
