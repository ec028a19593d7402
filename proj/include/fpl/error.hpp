/*
 * Copyright 2026 fpl-lab contributors
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef FPL_ERROR_HPP_
#define FPL_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace fpl {

enum class Errc {
  invalid_input,
  invalid_config,
  inconsistent_assignment,
  divergent_loss,
  undefined_score,
  undefined_similarity,
  training_diverged,
  io_failure,
};

inline const char* to_string(Errc code) {
  switch (code) {
    case Errc::invalid_input: return "invalid input";
    case Errc::invalid_config: return "invalid config";
    case Errc::inconsistent_assignment: return "inconsistent assignment";
    case Errc::divergent_loss: return "divergent loss";
    case Errc::undefined_score: return "undefined score";
    case Errc::undefined_similarity: return "undefined similarity";
    case Errc::training_diverged: return "training diverged";
    case Errc::io_failure: return "i/o failure";
  }
  return "unknown error";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace fpl

#endif  // FPL_ERROR_HPP_
