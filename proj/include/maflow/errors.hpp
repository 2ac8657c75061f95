#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace maflow {

/// Base of every error raised by the library. Flow errors get the simulation
/// time at which they happened attached while they propagate out of run().
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}

  void set_time(double t) { time_ = t; }
  std::optional<double> time() const { return time_; }

  std::string describe() const {
    if (!time_) return what();
    return std::string(what()) + " (at t=" + std::to_string(*time_) + ")";
  }

 private:
  std::optional<double> time_;
};

#define MAFLOW_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

MAFLOW_DEFINE_ERROR(InvalidSpec);
MAFLOW_DEFINE_ERROR(KaehlerConeViolation);
MAFLOW_DEFINE_ERROR(SingularMetric);
MAFLOW_DEFINE_ERROR(MonotonicityFailure);
MAFLOW_DEFINE_ERROR(InsufficientResolution);
MAFLOW_DEFINE_ERROR(StepSizeUnderflow);
MAFLOW_DEFINE_ERROR(NewtonDiverged);
MAFLOW_DEFINE_ERROR(IncompatibleData);
MAFLOW_DEFINE_ERROR(MassMismatch);
MAFLOW_DEFINE_ERROR(PositivityLoss);
MAFLOW_DEFINE_ERROR(ConfigError);
MAFLOW_DEFINE_ERROR(ConfigMismatch);
MAFLOW_DEFINE_ERROR(IoError);

#undef MAFLOW_DEFINE_ERROR

}  // namespace maflow
