#pragma once

#include <stdexcept>
#include <string>

namespace blackstock {

// A state or intermediate quantity became non-finite, or the energy left the
// admissible range.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The per-step fixed-point iteration did not contract.
class PicardFailure : public std::runtime_error {
 public:
  PicardFailure(const std::string& what, int iterations)
      : std::runtime_error(what), iterations_(iterations) {}
  int iterations() const { return iterations_; }

 private:
  int iterations_;
};

// An experiment's preconditions do not hold (unbracketed threshold, bad fit window...).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace blackstock
