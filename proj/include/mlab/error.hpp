#pragma once

#include <stdexcept>
#include <string>

namespace mlab {

enum class errc {
  invalid_argument,
  point_on_curve,
  unclosed_curve,
  resolution_too_coarse,
  winding_overflow,
  non_uniform_parametrization,
  not_simple,
  not_closed,
  not_positively_oriented,
  wrong_side,
  step_underflow,
  step_limit,
  unresolved_zero,
  bracket_failure,
  regime_violation,
  input_not_sorted,
  noise_floor,
  io_failure,
  config_error,
};

const char* errc_name(errc code);

/// Library-wide exception carrying a machine-checkable code.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

inline void require(bool ok, errc code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace mlab
