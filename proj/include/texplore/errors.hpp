#pragma once

#include <stdexcept>
#include <string>

namespace texplore {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotSymmetric : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

// Regressor Gram matrix is (numerically) singular: data not persistently exciting.
class RankDeficientData : public Error {
 public:
  using Error::Error;
};

// Simulated states blew up, typically an unstable initial model.
class Overflow : public Error {
 public:
  using Error::Error;
};

class ZeroDesign : public Error {
 public:
  using Error::Error;
};

class SolverInfeasible : public Error {
 public:
  SolverInfeasible(const std::string& what, int iteration)
      : Error(what), iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

class SolverFailure : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : Error("config field '" + field + "': " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace texplore
