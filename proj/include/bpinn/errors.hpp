#pragma once

#include <stdexcept>
#include <string>

namespace bpinn {

/// Optimization produced a non-finite energy; carries the epoch at which the
/// divergence was detected.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, int epoch)
      : std::runtime_error(what), epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

/// A baseline fit (nonlinear least squares, GP hyperparameters) could not be
/// completed even after damping/jitter escalation.
class FitFailureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input file rejected; carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, long line = -1)
      : std::runtime_error(line >= 0 ? what + " (line " + std::to_string(line) + ")"
                                     : what),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

}  // namespace bpinn
