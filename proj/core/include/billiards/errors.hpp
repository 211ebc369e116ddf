#pragma once

#include <stdexcept>
#include <string>

namespace billiards {

// Every failure mode raised by the library.  Codes map one-to-one onto the
// documented error names so callers can switch on them instead of parsing
// message text.
enum class errc {
  non_positive_radius,
  spherical_radius_too_large,
  theta_out_of_range,
  normalization_failure,
  empty_interval,
  truncated_state_space,
  image_escapes_state_space,
  reducible_chain,
  no_convergence,
  invalid_path,
  not_admissible,
  too_few_points,
  invalid_interval,
  negative_density,
  bin_mismatch,
  unsupported_alpha_form,
  invalid_argument,
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

// Caller handed us something outside the contract.  CLI maps this to exit 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// An internal invariant failed; the computation cannot be trusted.  CLI maps
// this to exit 2.
class InternalError : public Error {
 public:
  using Error::Error;
};

[[noreturn]] inline void throw_validation(errc code, const std::string& message) {
  throw ValidationError(code, message);
}

[[noreturn]] inline void throw_internal(errc code, const std::string& message) {
  throw InternalError(code, message);
}

inline void require(bool condition, errc code, const std::string& message) {
  if (!condition) throw_validation(code, message);
}

inline void ensure(bool condition, errc code, const std::string& message) {
  if (!condition) throw_internal(code, message);
}

}  // namespace billiards
