#pragma once

#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "robreg/grid.hpp"

namespace robreg {

/// Transfer from agent to principal when stopping at a level.
/// An empty value is the prohibited (+infinity) marker; it never holds a large float.
using Transfer = std::optional<double>;

inline constexpr Transfer prohibited = std::nullopt;

struct ZeroTax {};

/// lambda on [0, quota], prohibited above.
struct FixedTaxHardQuota {
  double lambda = 0.0;
  double quota = 0.0;
};

/// phi(l) = rate * l.
struct LinearTax {
  double rate = 0.0;
};

/// phi(l) = (exp(rate*l) - 1)/rate, so phi(0) = 0 and phi'(l) = exp(rate*l).
struct ExponentialTax {
  double rate = 1.0;
};

/// Transfers listed on a grid; evaluation snaps to the nearest grid level.
struct TabulatedTax {
  LevelGrid grid;
  std::vector<Transfer> values;
};

class Mechanism {
 public:
  using Family = std::variant<ZeroTax, FixedTaxHardQuota, LinearTax, ExponentialTax, TabulatedTax>;

  Mechanism() : family_(ZeroTax{}) {}
  Mechanism(Family family);  // NOLINT(google-explicit-constructor)
  template <class T>
    requires std::is_constructible_v<Family, T> && (!std::is_same_v<std::decay_t<T>, Family>)
  Mechanism(T family) : Mechanism(Family(std::move(family))) {}  // NOLINT(google-explicit-constructor)

  Transfer at(double l) const;
  bool is_quota_type() const noexcept;
  const Family& family() const noexcept { return family_; }
  std::string family_name() const;

 private:
  Family family_;
};

/// Transfers on every grid level.
std::vector<Transfer> transfers_on_grid(const Mechanism& m, const LevelGrid& grid);

/// Last index j with levels 0..j all allowed (the grid is cut at the first
/// prohibited level). Throws EmptyMechanismError when level 0 is prohibited.
std::size_t terminal_level(const std::vector<Transfer>& transfers);

}  // namespace robreg
