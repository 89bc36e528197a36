#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace digitime {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside the mathematical domain of an operation (e.g. omega <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent data (bad shares, duplicate rows, schema issues).
class DataError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Root bracketing failed: the function does not change sign on [lo, hi].
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double lo, double hi, double f_lo, double f_hi)
      : Error(what), lo(lo), hi(hi), f_lo(f_lo), f_hi(f_hi) {}
  double lo, hi, f_lo, f_hi;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_iterate)
      : Error(what), last_iterate(last_iterate) {}
  double last_iterate;
};

// Calibration equation has no admissible root; `bound` names the violated condition.
class NoSolutionError : public Error {
 public:
  NoSolutionError(const std::string& what, std::string bound)
      : Error(what), bound(std::move(bound)) {}
  std::string bound;
};

class RankError : public Error {
 public:
  RankError(const std::string& what, std::vector<std::string> collinear)
      : Error(what), collinear(std::move(collinear)) {}
  std::vector<std::string> collinear;
};

}  // namespace digitime
