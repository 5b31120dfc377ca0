#pragma once

#include <stdexcept>
#include <string>

namespace robreg {

/// Level or belief outside the model's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Principal payoff requested at a level the mechanism prohibits.
class UnreachableLevelError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Every level of the grid is prohibited.
class EmptyMechanismError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateDerivativeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A structural condition (monotone multiplier, ratio condition) does not hold.
class ConditionViolatedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BudgetExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotARefinementError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class AlignmentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration or command line; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace robreg
