#include "robreg/level_payoff.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "robreg/errors.hpp"

namespace robreg {

LevelPayoff::LevelPayoff(LevelGrid grid, std::vector<double> good, std::vector<double> bad,
                         std::vector<bool> allowed)
    : grid_(std::move(grid)),
      good_(std::move(good)),
      bad_(std::move(bad)),
      allowed_(std::move(allowed)) {}

LevelPayoff LevelPayoff::raw(const PayoffSpec& p, const LevelGrid& grid) {
  const std::size_t n = grid.size();
  std::vector<double> good(n), bad(n);
  for (std::size_t j = 0; j < n; ++j) {
    good[j] = p.utility(State::good, grid[j]);
    bad[j] = p.utility(State::bad, grid[j]);
  }
  return LevelPayoff(grid, std::move(good), std::move(bad), std::vector<bool>(n, true));
}

LevelPayoff LevelPayoff::adjusted(const PayoffSpec& p, const Mechanism& m, Side side,
                                  const LevelGrid& grid) {
  const std::size_t n = grid.size();
  std::vector<double> good(n), bad(n);
  std::vector<bool> allowed(n, true);
  const double sign = side == Side::agent ? -1.0 : 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    const Transfer phi = m.at(grid[j]);
    if (!phi) {
      allowed[j] = false;
      continue;
    }
    good[j] = p.utility(State::good, grid[j]) + sign * *phi;
    bad[j] = p.utility(State::bad, grid[j]) + sign * *phi;
  }
  return LevelPayoff(grid, std::move(good), std::move(bad), std::move(allowed));
}

double LevelPayoff::at(double mu, std::size_t j) const {
  if (!allowed_[j]) {
    throw UnreachableLevelError("payoff requested at prohibited level " + std::to_string(grid_[j]));
  }
  return mu * good_[j] + (1.0 - mu) * bad_[j];
}

double LevelPayoff::scale() const noexcept {
  double s = 1.0;
  for (std::size_t j = 0; j < size(); ++j) {
    if (!allowed_[j]) continue;
    s = std::max({s, std::abs(good_[j]), std::abs(bad_[j])});
  }
  return s;
}

std::optional<double> mechanism_adjusted(const PayoffSpec& p, const Mechanism& m, Side side,
                                         Belief mu, double l) {
  const Transfer phi = m.at(l);
  const double base = p.indirect(mu.value(), l);
  if (side == Side::agent) {
    if (!phi) return std::nullopt;
    return base - *phi;
  }
  if (!phi) {
    throw UnreachableLevelError("principal payoff at prohibited level " + std::to_string(l));
  }
  return base + *phi;
}

std::size_t one_shot_level(const LevelPayoff& f, double mu) {
  std::size_t best = f.size();
  double best_value = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const auto v = f.try_at(mu, j);
    if (!v) continue;
    if (best == f.size() || *v >= best_value) {
      best = j;
      best_value = *v;
    }
  }
  if (best == f.size()) throw EmptyMechanismError("no allowed level to stop at");
  return best;
}

PseudoInverse pseudo_inverse_belief(const LevelPayoff& f, std::size_t j, const BeliefGrid& beliefs) {
  if (j >= f.size()) throw DomainError("level index outside grid");
  // j = 0 uses the boundary definition: first belief with a one-shot level above 0.
  const std::size_t target = std::max<std::size_t>(j, 1);
  auto reaches = [&](double mu) { return one_shot_level(f, mu) >= target; };

  if (target >= f.size() || !reaches(1.0)) return {1.0, true};
  if (reaches(0.0)) return {0.0, false};

  std::size_t lo = 0, hi = beliefs.size() - 1;  // reaches(lo) false, reaches(hi) true
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    (reaches(beliefs[mid]) ? hi : lo) = mid;
  }
  double a = beliefs[lo], b = beliefs[hi];
  for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
    const double m = 0.5 * (a + b);
    (reaches(m) ? b : a) = m;
  }
  return {b, false};
}

}  // namespace robreg
