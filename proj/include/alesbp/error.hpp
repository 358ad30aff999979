#pragma once

#include <stdexcept>
#include <string>

namespace alesbp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A nodal Jacobian (or node ordering) collapsed to a non-positive value.
class DegenerateMesh : public Error {
 public:
  DegenerateMesh(const std::string& what, double t) : Error(what), time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// Non-finite values appeared in the solution.
class NumericalBreakdown : public Error {
 public:
  NumericalBreakdown(const std::string& what, double t) : Error(what), time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

}  // namespace alesbp
