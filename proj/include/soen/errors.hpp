#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace soen {

// Numeric precondition violated (bad bias, voltage beyond clamp, empty table...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Bias at or above the array critical current: the receiver is normal with
// no photons at all, so a threshold does not exist.
class AlwaysFiresError : public DomainError {
 public:
  explicit AlwaysFiresError(double i_bias_ua, double i_c_array_ua)
      : DomainError("bias " + std::to_string(i_bias_ua) + " uA is at or above the array critical current " +
                    std::to_string(i_c_array_ua) + " uA (always fires)"),
        i_bias_ua_(i_bias_ua),
        i_c_array_ua_(i_c_array_ua) {}

  double i_bias_ua() const { return i_bias_ua_; }
  double i_c_array_ua() const { return i_c_array_ua_; }

 private:
  double i_bias_ua_;
  double i_c_array_ua_;
};

class CapExceededError : public DomainError {
 public:
  explicit CapExceededError(std::uint64_t cap)
      : DomainError("50% spike probability not reached within photon cap " + std::to_string(cap)), cap_(cap) {}

  std::uint64_t cap() const { return cap_; }

 private:
  std::uint64_t cap_;
};

// Invalid configuration document, schema violation or topology mismatch.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Internal invariant breach (event scheduled in the past, solver failure).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace soen
