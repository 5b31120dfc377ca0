#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace robreg {

/// Probability that the technology is beneficial.
class Belief {
 public:
  explicit Belief(double mu);
  double value() const noexcept { return mu_; }

 private:
  double mu_;
};

/// Uniform level grid 0 = l_0 < ... < l_{n-1} = l_max.
class LevelGrid {
 public:
  LevelGrid(double l_max, std::size_t n);

  double l_max() const noexcept { return points_.back(); }
  std::size_t size() const noexcept { return points_.size(); }
  double step() const noexcept { return step_; }
  double operator[](std::size_t j) const { return points_[j]; }
  std::span<const double> points() const noexcept { return points_; }

  /// Nearest grid index; throws DomainError outside [0, l_max].
  std::size_t index_of(double l) const;
  bool contains(double l) const noexcept;

  /// Prefix grid l_0..l_last, sharing the same points; a single point when last = 0.
  LevelGrid truncated(std::size_t last) const;

 private:
  LevelGrid() = default;
  std::vector<double> points_;
  double step_ = 0.0;
};

/// Uniform belief grid k/(n_mu-1), k = 0..n_mu-1.
class BeliefGrid {
 public:
  explicit BeliefGrid(std::size_t n_mu = 1001);
  std::size_t size() const noexcept { return n_; }
  double operator[](std::size_t k) const noexcept {
    return k + 1 == n_ ? 1.0 : static_cast<double>(k) / static_cast<double>(n_ - 1);
  }

 private:
  std::size_t n_;
};

}  // namespace robreg
