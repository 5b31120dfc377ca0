#include "robreg/mechanism.hpp"

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
}  // namespace

Mechanism::Mechanism(Family family) : family_(std::move(family)) {
  std::visit(overloaded{
                 [](const ZeroTax&) {},
                 [](const FixedTaxHardQuota& q) {
                   if (!std::isfinite(q.lambda) || !(q.quota >= 0.0)) {
                     throw DomainError("hard quota needs a finite tax and a quota level >= 0");
                   }
                 },
                 [](const LinearTax& t) {
                   if (!std::isfinite(t.rate)) throw DomainError("linear tax rate must be finite");
                 },
                 [](const ExponentialTax& t) {
                   if (!(t.rate > 0.0) || !std::isfinite(t.rate)) {
                     throw DomainError("exponential tax rate must be positive");
                   }
                 },
                 [](const TabulatedTax& t) {
                   if (t.values.size() != t.grid.size()) {
                     throw DomainError("tabulated mechanism size does not match its grid");
                   }
                   for (const auto& v : t.values) {
                     if (v && !std::isfinite(*v)) {
                       throw DomainError("tabulated transfers must be finite or prohibited");
                     }
                   }
                 },
             },
             family_);
}

Transfer Mechanism::at(double l) const {
  return std::visit(
      overloaded{
          [](const ZeroTax&) -> Transfer { return 0.0; },
          [l](const FixedTaxHardQuota& q) -> Transfer {
            const double tol = 1e-12 * std::max(1.0, std::abs(q.quota));
            if (l > q.quota + tol) return prohibited;
            return q.lambda;
          },
          [l](const LinearTax& t) -> Transfer { return t.rate * l; },
          [l](const ExponentialTax& t) -> Transfer { return std::expm1(t.rate * l) / t.rate; },
          [l](const TabulatedTax& t) -> Transfer { return t.values[t.grid.index_of(l)]; },
      },
      family_);
}

bool Mechanism::is_quota_type() const noexcept {
  return std::holds_alternative<FixedTaxHardQuota>(family_) ||
         std::holds_alternative<TabulatedTax>(family_);
}

std::string Mechanism::family_name() const {
  return std::visit(overloaded{
                        [](const ZeroTax&) { return std::string("zero"); },
                        [](const FixedTaxHardQuota&) { return std::string("fixed_tax_hard_quota"); },
                        [](const LinearTax&) { return std::string("linear"); },
                        [](const ExponentialTax&) { return std::string("exponential"); },
                        [](const TabulatedTax&) { return std::string("tabulated"); },
                    },
                    family_);
}

std::vector<Transfer> transfers_on_grid(const Mechanism& m, const LevelGrid& grid) {
  std::vector<Transfer> out(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) out[j] = m.at(grid[j]);
  return out;
}

std::size_t terminal_level(const std::vector<Transfer>& transfers) {
  if (transfers.empty() || !transfers.front()) {
    throw EmptyMechanismError("mechanism prohibits every level");
  }
  std::size_t j = 0;
  while (j + 1 < transfers.size() && transfers[j + 1]) ++j;
  return j;
}

}  // namespace robreg
