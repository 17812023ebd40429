#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace lgo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad domain descriptor, undefined data, unreadable file.
class SpecError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Superlevel sets of two ladder levels failed to nest. Carries the offending
/// pair and the nodes of E_t that are missing from E_s.
class NestingViolation : public Error {
 public:
  NestingViolation(double s, double t, std::vector<std::size_t> witness)
      : Error("nesting violation between levels s=" + std::to_string(s) +
              " and t=" + std::to_string(t) + " (" +
              std::to_string(witness.size()) + " witness nodes)"),
        s_(s),
        t_(t),
        witness_(std::move(witness)) {}

  double s() const { return s_; }
  double t() const { return t_; }
  const std::vector<std::size_t>& witness() const { return witness_; }

 private:
  double s_;
  double t_;
  std::vector<std::size_t> witness_;
};

/// The foam construction could not place the requested number of balls.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace lgo
