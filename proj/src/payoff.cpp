#include "robreg/payoff.hpp"

#include <algorithm>
#include <cmath>

#include "robreg/errors.hpp"

namespace robreg {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double crra_utility(double wealth, double gamma) {
  return (std::pow(wealth, 1.0 - gamma) - 1.0) / (1.0 - gamma);
}

double interpolate(const LevelGrid& grid, const std::vector<double>& values, double l) {
  if (!grid.contains(l)) {
    throw DomainError("level " + std::to_string(l) + " outside tabulated range");
  }
  const double pos = std::clamp(l / grid.step(), 0.0, static_cast<double>(grid.size() - 1));
  const auto j = static_cast<std::size_t>(std::floor(pos));
  if (j + 1 >= grid.size()) return values.back();
  const double w = pos - static_cast<double>(j);
  if (w == 0.0) return values[j];
  return (1.0 - w) * values[j] + w * values[j + 1];
}

}  // namespace

PayoffSpec::PayoffSpec(Family family) : family_(std::move(family)) {
  std::visit(overloaded{
                 [](const Quadratic& q) {
                   if (!(q.alpha > 0.0 && q.beta > 0.0 && q.gamma >= 0.0)) {
                     throw DomainError("quadratic payoff needs alpha, beta > 0 and gamma >= 0");
                   }
                 },
                 [](const Cara& c) {
                   if (!(c.gamma > 0.0)) throw DomainError("CARA needs gamma > 0");
                 },
                 [](const Crra& c) {
                   if (!(c.gamma > 0.0) || c.gamma == 1.0) {
                     throw DomainError("CRRA needs gamma > 0, gamma != 1");
                   }
                   if (!(c.floor > 0.0)) throw DomainError("CRRA needs a positive level floor");
                 },
                 [](const Tabulated& t) {
                   if (t.good.size() != t.grid.size() || t.bad.size() != t.grid.size()) {
                     throw DomainError("tabulated payoff size does not match its grid");
                   }
                   for (std::size_t j = 0; j < t.good.size(); ++j) {
                     if (!std::isfinite(t.good[j]) || !std::isfinite(t.bad[j])) {
                       throw DomainError("tabulated payoff must be finite");
                     }
                   }
                 },
             },
             family_);
}

double PayoffSpec::utility(State s, double l) const {
  if (!(l >= -1e-12)) throw DomainError("negative level " + std::to_string(l));
  l = std::max(l, 0.0);
  const bool good = s == State::good;
  return std::visit(
      overloaded{
          [&](const Quadratic& q) { return good ? q.alpha * l : -q.beta * l - q.gamma * l * l; },
          [&](const Cara& c) { return good ? -std::exp(-c.gamma * l) : -std::exp(c.gamma * l); },
          [&](const Crra& c) {
            const double lv = std::max(l, c.floor);
            return crra_utility(good ? lv : 1.0 / lv, c.gamma);
          },
          [&](const Tabulated& t) { return interpolate(t.grid, good ? t.good : t.bad, l); },
      },
      family_);
}

std::string PayoffSpec::family_name() const {
  return std::visit(overloaded{
                        [](const Quadratic&) { return std::string("quadratic"); },
                        [](const Cara&) { return std::string("cara"); },
                        [](const Crra&) { return std::string("crra"); },
                        [](const Tabulated&) { return std::string("tabulated"); },
                    },
                    family_);
}

PayoffSpec PayoffSpec::shifted(double c, const LevelGrid& grid) const {
  Tabulated t{grid, std::vector<double>(grid.size()), std::vector<double>(grid.size())};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    t.good[j] = utility(State::good, grid[j]) + c;
    t.bad[j] = utility(State::bad, grid[j]) + c;
  }
  return PayoffSpec(std::move(t));
}

PayoffPair quadratic_pair(double alpha, double beta, double gamma) {
  return {PayoffSpec(Quadratic{alpha, beta, 0.0}), PayoffSpec(Quadratic{alpha, beta, gamma})};
}

PayoffPair cara_pair(double gamma_agent, double gamma_principal) {
  return {PayoffSpec(Cara{gamma_agent}), PayoffSpec(Cara{gamma_principal})};
}

double indirect_utility(const PayoffSpec& p, Belief mu, double l, const LevelGrid& grid) {
  if (!grid.contains(l)) {
    throw DomainError("level " + std::to_string(l) + " outside [0, " +
                      std::to_string(grid.l_max()) + "]");
  }
  return p.indirect(mu.value(), std::clamp(l, 0.0, grid.l_max()));
}

PayoffSpec liability_transform(const PayoffSpec& agent, double cap, const PayoffSpec& principal,
                               const LevelGrid& grid) {
  if (!(cap >= 0.0)) throw DomainError("liability cap must be nonnegative");
  Tabulated t{grid, std::vector<double>(grid.size()), std::vector<double>(grid.size())};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double l = grid[j];
    const double u0 = agent.utility(State::bad, l);
    const double wedge = std::max(u0 - principal.utility(State::bad, l), 0.0);
    t.good[j] = agent.utility(State::good, l);
    t.bad[j] = u0 - std::min(wedge, cap);
  }
  return PayoffSpec(std::move(t));
}

}  // namespace robreg
