#pragma once

#include <stdexcept>
#include <string>

namespace wmpg {

/// Invalid configuration: mismatched dimensions, out-of-range settings, bad spec files.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operation was invoked in the wrong order or with an empty input.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Non-finite values or impossible divisions.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Without-replacement sampling cannot satisfy the requested sample size.
class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wmpg
