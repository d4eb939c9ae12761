#pragma once

#include <stdexcept>
#include <string>

namespace revlat {

// Base for every library error. The CLI maps CapacityError to exit code 2 and
// everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& msg) : Error("domain error: " + msg) {}
};

class OrderDetectionError : public Error {
 public:
  explicit OrderDetectionError(const std::string& msg) : Error("order detection: " + msg) {}
};

class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& msg) : Error("capacity exceeded: " + msg) {}
};

class QuadratureError : public Error {
 public:
  explicit QuadratureError(const std::string& msg) : Error("quadrature: " + msg) {}
};

class EmptyIntervalError : public Error {
 public:
  explicit EmptyIntervalError(const std::string& msg) : Error("empty interval: " + msg) {}
};

class MonotonicityError : public Error {
 public:
  explicit MonotonicityError(const std::string& msg) : Error("monotonicity: " + msg) {}
};

class HypothesisError : public Error {
 public:
  explicit HypothesisError(const std::string& msg) : Error("hypothesis violated: " + msg) {}
};

class InsufficientDataError : public Error {
 public:
  explicit InsufficientDataError(const std::string& msg) : Error("insufficient data: " + msg) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg) : Error("validation: " + msg) {}
};

}  // namespace revlat
