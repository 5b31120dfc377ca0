#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "robreg/level_payoff.hpp"

// Grid scans used by the checkers and the mechanism constructors. Each kernel
// has a serial reference and an OpenMP variant with identical results; the
// OpenMP variant falls back to the serial loop when OpenMP is unavailable.
namespace robreg::kernels {

/// True when the library was built with OpenMP.
bool parallel_enabled() noexcept;

namespace serial {
std::vector<std::size_t> one_shot_levels(const LevelPayoff& f, std::span<const double> beliefs);
/// [U(mu,l_j) - U(mu,0)] + V(mu,l_j) for every level.
std::vector<double> surplus_curve(const LevelPayoff& agent, const LevelPayoff& principal, double mu);
/// Pointwise minimum of equally sized curves.
std::vector<double> lower_envelope(const std::vector<std::vector<double>>& curves);
}  // namespace serial

namespace omp {
std::vector<std::size_t> one_shot_levels(const LevelPayoff& f, std::span<const double> beliefs);
std::vector<double> surplus_curve(const LevelPayoff& agent, const LevelPayoff& principal, double mu);
std::vector<double> lower_envelope(const std::vector<std::vector<double>>& curves);
}  // namespace omp

/// The joint surplus at a single point; shared by the static and adaptive constructions
/// so both produce bit-identical numbers.
inline double joint_surplus(const LevelPayoff& agent, const LevelPayoff& principal, double mu0,
                            double mu, std::size_t j) {
  return (agent.at(mu, j) - agent.at(mu0, 0)) + principal.at(mu, j);
}

}  // namespace robreg::kernels
