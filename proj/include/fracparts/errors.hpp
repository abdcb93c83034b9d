#pragma once

#include <stdexcept>
#include <string>

namespace fracparts {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// An enumeration (scan range, h-box, multiset count) exceeds its cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

class PrecisionError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class IntegralityFailure : public Error {
 public:
  using Error::Error;
};

class DegenerateHorizon : public Error {
 public:
  using Error::Error;
};

// A lifted index falls outside the parent horizon.
class HorizonOverflow : public Error {
 public:
  using Error::Error;
};

class LiftVerificationFailure : public Error {
 public:
  LiftVerificationFailure(std::string what, std::size_t index, double excess)
      : Error(std::move(what)), index_(index), excess_(excess) {}
  std::size_t index() const { return index_; }
  // dist - eps at the failing coordinate.
  double excess() const { return excess_; }

 private:
  std::size_t index_;
  double excess_;
};

}  // namespace fracparts
