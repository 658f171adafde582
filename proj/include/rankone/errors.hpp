#ifndef RANKONE_ERRORS_HPP
#define RANKONE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rankone {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
  explicit DomainError(const std::string &what) : std::domain_error(what) {}
};

/// Exact division was requested but the divisor does not divide.
class NotDivisible : public std::runtime_error {
public:
  explicit NotDivisible(const std::string &what) : std::runtime_error(what) {}
};

/// Requested object would exceed a configured size cap.
class ResourceError : public std::runtime_error {
public:
  explicit ResourceError(const std::string &what) : std::runtime_error(what) {}
};

/// Mobius inversion produced a negative or fractional splitting count.
class NonIntegralSplitting : public std::runtime_error {
public:
  explicit NonIntegralSplitting(const std::string &what)
      : std::runtime_error(what) {}
};

/// An implication that holds for every finite group failed; always a bug.
class LogicError : public std::logic_error {
public:
  explicit LogicError(const std::string &what) : std::logic_error(what) {}
};

} // namespace rankone

#endif // RANKONE_ERRORS_HPP
