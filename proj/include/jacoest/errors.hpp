#pragma once

#include <stdexcept>
#include <string>

namespace jacoest {

/// Invalid input data: case files, scenario configs, malformed networks.
/// The CLI maps this family to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes that do not agree with each other or with the network.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base for failures of a numerical procedure on otherwise valid input.
/// The CLI maps this family to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergence : public NumericalError {
 public:
  NonConvergence(int iterations, double mismatch, const std::string& context = {})
      : NumericalError((context.empty() ? "" : context + ": ") +
                       "power flow did not converge after " + std::to_string(iterations) +
                       " iterations (mismatch " + std::to_string(mismatch) + " p.u.)"),
        iterations_(iterations),
        mismatch_(mismatch) {}

  int iterations() const noexcept { return iterations_; }
  double mismatch() const noexcept { return mismatch_; }

 private:
  int iterations_;
  double mismatch_;
};

class SingularJacobian : public NumericalError {
 public:
  explicit SingularJacobian(int iteration, const std::string& context = {})
      : NumericalError((context.empty() ? "" : context + ": ") +
                       "singular power-flow Jacobian at iteration " + std::to_string(iteration)),
        iteration_(iteration) {}

  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

/// TLS cannot proceed: the lower-right block of the right singular vectors
/// is singular, so the null space does not determine the estimate.
class SingularV22 : public NumericalError {
 public:
  explicit SingularV22(double smallest_singular_value)
      : NumericalError("TLS: V22 block is singular (sigma_min = " +
                       std::to_string(smallest_singular_value) + ")"),
        sigma_min_(smallest_singular_value) {}

  double sigma_min() const noexcept { return sigma_min_; }

 private:
  double sigma_min_;
};

class WindowTooShort : public NumericalError {
 public:
  WindowTooShort(int t, int n)
      : NumericalError("measurement window too short: T = " + std::to_string(t) +
                       " must exceed N = " + std::to_string(n)) {}
};

class MemoryBudgetExceeded : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TrainingDiverged : public NumericalError {
 public:
  TrainingDiverged(int epoch, double loss)
      : NumericalError("neural network training diverged at epoch " + std::to_string(epoch) +
                       " (loss " + std::to_string(loss) + ")"),
        epoch_(epoch) {}

  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

}  // namespace jacoest
