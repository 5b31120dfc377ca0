#include "robreg/kernels.hpp"

#include <algorithm>
#include <cstdint>

#include "robreg/errors.hpp"

namespace robreg::kernels {

bool parallel_enabled() noexcept {
#ifdef ROBREG_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

namespace {
void check_envelope(const std::vector<std::vector<double>>& curves) {
  if (curves.empty()) throw DomainError("lower envelope of an empty family");
  for (const auto& c : curves) {
    if (c.size() != curves.front().size()) throw DomainError("curves differ in length");
  }
}
}  // namespace

namespace serial {

std::vector<std::size_t> one_shot_levels(const LevelPayoff& f, std::span<const double> beliefs) {
  std::vector<std::size_t> out(beliefs.size());
  for (std::size_t k = 0; k < beliefs.size(); ++k) out[k] = one_shot_level(f, beliefs[k]);
  return out;
}

std::vector<double> surplus_curve(const LevelPayoff& agent, const LevelPayoff& principal, double mu) {
  std::vector<double> out(agent.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = joint_surplus(agent, principal, mu, mu, j);
  return out;
}

std::vector<double> lower_envelope(const std::vector<std::vector<double>>& curves) {
  check_envelope(curves);
  std::vector<double> out = curves.front();
  for (std::size_t j = 0; j < out.size(); ++j) {
    for (std::size_t c = 1; c < curves.size(); ++c) out[j] = std::min(out[j], curves[c][j]);
  }
  return out;
}

}  // namespace serial

namespace omp {

std::vector<std::size_t> one_shot_levels(const LevelPayoff& f, std::span<const double> beliefs) {
  std::vector<std::size_t> out(beliefs.size());
  const auto n = static_cast<std::int64_t>(beliefs.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < n; ++k) {
    out[static_cast<std::size_t>(k)] = one_shot_level(f, beliefs[static_cast<std::size_t>(k)]);
  }
  return out;
}

std::vector<double> surplus_curve(const LevelPayoff& agent, const LevelPayoff& principal, double mu) {
  std::vector<double> out(agent.size());
  const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < n; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    out[jj] = joint_surplus(agent, principal, mu, mu, jj);
  }
  return out;
}

std::vector<double> lower_envelope(const std::vector<std::vector<double>>& curves) {
  check_envelope(curves);
  std::vector<double> out = curves.front();
  const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < n; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    for (std::size_t c = 1; c < curves.size(); ++c) out[jj] = std::min(out[jj], curves[c][jj]);
  }
  return out;
}

}  // namespace omp

}  // namespace robreg::kernels
