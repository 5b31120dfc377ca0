#pragma once

#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "robreg/grid.hpp"

namespace robreg {

enum class State { bad = 0, good = 1 };

/// u(1,l) = alpha*l, u(0,l) = -beta*l - gamma*l^2.
struct Quadratic {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 0.0;
};

/// u = -exp(-gamma*W) with wealth W(1,l) = l, W(0,l) = -l.
struct Cara {
  double gamma = 1.0;
};

/// u = (W^(1-gamma) - 1)/(1-gamma) with W(1,l) = l, W(0,l) = 1/l.
/// Levels below `floor` are evaluated at `floor` (the wealth map is singular at 0).
struct Crra {
  double gamma = 2.0;
  double floor = 1e-3;
};

/// Utilities given on a level grid, linearly interpolated in between.
struct Tabulated {
  LevelGrid grid;
  std::vector<double> good;
  std::vector<double> bad;
};

/**
 * State-dependent utility u(theta, l) for one party.
 *
 * Indirect utility is the belief-weighted average of the two state utilities;
 * all the model's objects are built from it.
 */
class PayoffSpec {
 public:
  using Family = std::variant<Quadratic, Cara, Crra, Tabulated>;

  PayoffSpec(Family family);  // NOLINT(google-explicit-constructor)
  template <class T>
    requires std::is_constructible_v<Family, T> && (!std::is_same_v<std::decay_t<T>, Family>)
  PayoffSpec(T family) : PayoffSpec(Family(std::move(family))) {}  // NOLINT(google-explicit-constructor)

  /// u(theta, l). Throws DomainError for l < 0 or beyond a tabulated range.
  double utility(State s, double l) const;

  /// mu*u(1,l) + (1-mu)*u(0,l).
  double indirect(double mu, double l) const {
    return mu * utility(State::good, l) + (1.0 - mu) * utility(State::bad, l);
  }

  const Family& family() const noexcept { return family_; }
  std::string family_name() const;

  /// Same payoff plus a constant in both states.
  PayoffSpec shifted(double c, const LevelGrid& grid) const;

 private:
  Family family_;
};

/// Agent and principal pair from the quadratic externality example:
/// the agent is risk neutral, the principal adds -gamma*l^2 in the bad state.
struct PayoffPair {
  PayoffSpec agent;
  PayoffSpec principal;
};
PayoffPair quadratic_pair(double alpha, double beta, double gamma);
PayoffPair cara_pair(double gamma_agent, double gamma_principal);

/// indirect utility with the grid bound check on l.
double indirect_utility(const PayoffSpec& p, Belief mu, double l, const LevelGrid& grid);

/**
 * Agent payoff net of a capped ex-post liability.
 *
 * The agent pays L(0,l) = min{max(u(0,l) - v(0,l), 0), cap} in the bad state
 * and nothing in the good state; the result is tabulated on `grid`.
 */
PayoffSpec liability_transform(const PayoffSpec& agent, double cap, const PayoffSpec& principal,
                               const LevelGrid& grid);

}  // namespace robreg
