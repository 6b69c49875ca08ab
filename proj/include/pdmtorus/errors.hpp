#ifndef PDMTORUS_ERRORS_HPP
#define PDMTORUS_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pdmtorus {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad step size, bad sizes...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A function was evaluated outside its domain or produced a non-finite value.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, double where)
      : Error(what + " (at x = " + std::to_string(where) + ")"), where_(where) {}
  explicit DomainError(const std::string& what) : Error(what) {}

  double where() const noexcept { return where_; }

 private:
  double where_ = 0.0;
};

class IntegrationDiverged : public Error {
 public:
  IntegrationDiverged(const std::string& what, double last_good_time)
      : Error(what + " (last good t = " + std::to_string(last_good_time) + ")"),
        last_good_time_(last_good_time) {}

  double last_good_time() const noexcept { return last_good_time_; }

 private:
  double last_good_time_;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::size_t index)
      : Error(what + " (eigenpair index " + std::to_string(index) + ")"), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// No root of a matching equation exists; carries the attainable interval.
class RangeError : public Error {
 public:
  RangeError(const std::string& what, double lo, double hi)
      : Error(what + " (attainable range [" + std::to_string(lo) + ", " + std::to_string(hi) + "])"),
        lo_(lo),
        hi_(hi) {}

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, double location)
      : Error(what + " (singular at x = " + std::to_string(location) + ")"), location_(location) {}

  double location() const noexcept { return location_; }

 private:
  double location_;
};

}  // namespace pdmtorus

#endif  // PDMTORUS_ERRORS_HPP
