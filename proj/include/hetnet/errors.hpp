#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hetnet {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A location that no (virtual) base station can serve at a positive rate.
class CoverageError : public std::runtime_error {
 public:
  CoverageError(std::size_t location, const std::string& what)
      : std::runtime_error(what), location_(location) {}
  std::size_t location() const { return location_; }

 private:
  std::size_t location_;
};

/// A queue with load factor >= 1 where a stable one is required.
class UnstableError : public std::runtime_error {
 public:
  UnstableError(std::size_t queue, double rho, const std::string& what)
      : std::runtime_error(what), queue_(queue), rho_(rho) {}
  std::size_t queue() const { return queue_; }
  double rho() const { return rho_; }

 private:
  std::size_t queue_;
  double rho_;
};

/// The requested arrival rate admits no association meeting the load cap.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hetnet
