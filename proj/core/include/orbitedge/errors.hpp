#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace orbitedge {

// Base of every error thrown by the library. Callers that only care about
// "something in the model went wrong" catch this one.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidTopologyError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class InvalidGeometryError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

class InfeasibleLoadError : public Error {
 public:
  using Error::Error;
};

class NoContactError : public Error {
 public:
  using Error::Error;
};

class NoRouteError : public Error {
 public:
  using Error::Error;
};

class SizeLimitError : public Error {
 public:
  using Error::Error;
};

// Raised by the processing scheduler when no allocation satisfies the
// capacity constraints. `violated` names each constraint that cannot hold.
class InfeasibleAllocationError : public Error {
 public:
  InfeasibleAllocationError(const std::string& what, std::vector<std::string> violated)
      : Error(what), violated_(std::move(violated)) {}
  const std::vector<std::string>& violated() const noexcept { return violated_; }

 private:
  std::vector<std::string> violated_;
};

// Collects every problem found while validating a scenario.
class ValidationError : public ConfigError {
 public:
  explicit ValidationError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

}  // namespace orbitedge
