#pragma once

#include <stdexcept>
#include <string>

namespace epiwave {

struct InvalidParams : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NoEndemicEquilibrium : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StepTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InstabilityDetected : std::runtime_error {
  double last_stable_time;
  explicit InstabilityDetected(double t_last, const std::string& what)
      : std::runtime_error(what), last_stable_time(t_last) {}
};

struct NonpositiveLambda : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SubcriticalR0 : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SpeedNotSupercritical : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidCertificate : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct BadEpsilon : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct BadGamma : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InsufficientPoints : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonpositiveProfile : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace epiwave
