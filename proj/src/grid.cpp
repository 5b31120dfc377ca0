#include "robreg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "robreg/errors.hpp"

namespace robreg {

Belief::Belief(double mu) : mu_(mu) {
  if (!(mu >= 0.0 && mu <= 1.0)) {
    throw DomainError("belief must lie in [0,1], got " + std::to_string(mu));
  }
}

LevelGrid::LevelGrid(double l_max, std::size_t n) {
  if (n < 2) throw DomainError("level grid needs at least two points");
  if (!(l_max > 0.0) || !std::isfinite(l_max)) {
    throw DomainError("level grid needs a finite l_max > 0");
  }
  points_.resize(n);
  const double denom = static_cast<double>(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    points_[j] = l_max * (static_cast<double>(j) / denom);
  }
  points_.front() = 0.0;
  points_.back() = l_max;
  step_ = l_max / denom;
}

bool LevelGrid::contains(double l) const noexcept {
  const double tol = 1e-12 * std::max(1.0, l_max());
  return l >= -tol && l <= l_max() + tol;
}

std::size_t LevelGrid::index_of(double l) const {
  if (!contains(l)) {
    throw DomainError("level " + std::to_string(l) + " outside [0, " + std::to_string(l_max()) +
                      "]");
  }
  const double pos = std::round(l / step_);
  const auto j = static_cast<std::size_t>(std::max(0.0, pos));
  return std::min(j, size() - 1);
}

LevelGrid LevelGrid::truncated(std::size_t last) const {
  if (last >= size()) {
    throw DomainError("truncation index must lie in [0, n-1]");
  }
  LevelGrid g;
  g.points_.assign(points_.begin(), points_.begin() + static_cast<std::ptrdiff_t>(last) + 1);
  g.step_ = step_;
  return g;
}

BeliefGrid::BeliefGrid(std::size_t n_mu) : n_(n_mu) {
  if (n_mu < 2) throw DomainError("belief grid needs at least two points");
}

}  // namespace robreg
