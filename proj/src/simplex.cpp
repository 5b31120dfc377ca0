#include "robreg/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "robreg/errors.hpp"

namespace robreg {

namespace {

// Dictionary for: maximize c'x s.t. Ax <= b, x >= 0. Column n is the phase-one
// auxiliary variable, column n+1 the right-hand side; row m is the objective,
// row m+1 the phase-one objective.
class Tableau {
 public:
  Tableau(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
          const std::vector<double>& c, const LpOptions& opts)
      : m_(b.size()), n_(c.size()), w_(n_ + 2), d_((m_ + 2) * w_, 0.0), basis_(m_), nonbasis_(n_ + 1),
        opts_(opts) {
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) at(i, j) = A[i][j];
      at(i, n_) = -1.0;
      at(i, n_ + 1) = b[i];
      basis_[i] = static_cast<long>(n_ + i);
    }
    for (std::size_t j = 0; j < n_; ++j) {
      nonbasis_[j] = static_cast<long>(j);
      at(m_, j) = -c[j];
    }
    nonbasis_[n_] = -1;
    at(m_ + 1, n_) = 1.0;
  }

  LpStatus solve(std::vector<double>& x, std::size_t& iterations) {
    limit_ = opts_.max_iterations ? opts_.max_iterations : 50 * (m_ + n_ + 2);
    std::size_t r = 0;
    for (std::size_t i = 1; i < m_; ++i) {
      if (at(i, n_ + 1) < at(r, n_ + 1)) r = i;
    }
    if (m_ > 0 && at(r, n_ + 1) < -opts_.eps) {
      pivot(r, n_);
      const LpStatus s = run(1);
      iterations = iterations_;
      if (s == LpStatus::iteration_limit) return s;
      if (at(m_ + 1, n_ + 1) < -1e-9) {
        extract(x);
        return LpStatus::infeasible;
      }
      for (std::size_t i = 0; i < m_; ++i) {
        if (basis_[i] != -1) continue;
        // The auxiliary variable is basic at zero: swap it for the largest pivot in its row.
        std::size_t s_best = 0;
        for (std::size_t j = 1; j <= n_; ++j) {
          if (std::abs(at(i, j)) > std::abs(at(i, s_best))) s_best = j;
        }
        if (std::abs(at(i, s_best)) > opts_.eps) pivot(i, s_best);
      }
    }
    const LpStatus s = run(2);
    iterations = iterations_;
    extract(x);
    return s;
  }

 private:
  double& at(std::size_t i, std::size_t j) { return d_[i * w_ + j]; }

  void pivot(std::size_t r, std::size_t s) {
    const double inv = 1.0 / at(r, s);
    double* row_r = &d_[r * w_];
    // Obedience rows are triangular, so the pivot row is often sparse.
    nz_.clear();
    for (std::size_t j = 0; j < w_; ++j) {
      if (row_r[j] != 0.0 && j != s) nz_.push_back(j);
    }
    const bool sparse = nz_.size() * 3 < w_;
    for (std::size_t i = 0; i < m_ + 2; ++i) {
      if (i == r) continue;
      double* row_i = &d_[i * w_];
      const double f = row_i[s] * inv;
      if (f == 0.0) continue;
      if (sparse) {
        for (std::size_t j : nz_) row_i[j] -= row_r[j] * f;
      } else {
        for (std::size_t j = 0; j < w_; ++j) row_i[j] -= row_r[j] * f;
      }
      row_i[s] = -f;
    }
    for (std::size_t j = 0; j < w_; ++j) row_r[j] *= inv;
    row_r[s] = inv;
    std::swap(basis_[r], nonbasis_[s]);
    ++iterations_;
  }

  LpStatus run(int phase) {
    const std::size_t obj = phase == 1 ? m_ + 1 : m_;
    std::size_t degenerate = 0;
    while (true) {
      if (iterations_ >= limit_) return LpStatus::iteration_limit;
      const bool bland = degenerate >= opts_.bland_after;
      const bool edge = opts_.steepest_edge && !bland;
      if (edge) {
        norms_.assign(n_ + 1, 1.0);
        for (std::size_t i = 0; i < m_; ++i) {
          const double* row = &d_[i * w_];
          for (std::size_t j = 0; j <= n_; ++j) norms_[j] += row[j] * row[j];
        }
      }
      std::size_t s = n_ + 1;
      double best_score = 0.0;
      for (std::size_t j = 0; j <= n_; ++j) {
        if (phase == 2 && nonbasis_[j] == -1) continue;
        const double dj = at(obj, j);
        if (dj >= -opts_.eps) continue;
        const double score = edge ? dj / std::sqrt(norms_[j]) : dj;
        if (s == n_ + 1) {
          s = j;
          best_score = score;
        } else if (bland ? nonbasis_[j] < nonbasis_[s] : score < best_score) {
          s = j;
          best_score = score;
        }
      }
      if (s == n_ + 1) return LpStatus::optimal;

      std::size_t r = m_;
      double best = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = at(i, s);
        if (a <= opts_.eps) continue;
        const double ratio = at(i, n_ + 1) / a;
        if (r == m_ || ratio < best || (ratio == best && basis_[i] < basis_[r])) {
          r = i;
          best = ratio;
        }
      }
      if (r == m_) return LpStatus::unbounded;
      degenerate = best <= opts_.eps ? degenerate + 1 : 0;
      pivot(r, s);
    }
  }

  void extract(std::vector<double>& x) {
    x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] >= 0 && static_cast<std::size_t>(basis_[i]) < n_) {
        x[static_cast<std::size_t>(basis_[i])] = std::max(0.0, at(i, n_ + 1));
      }
    }
  }

  std::size_t m_, n_, w_;
  std::vector<double> d_;
  std::vector<long> basis_, nonbasis_;
  std::vector<std::size_t> nz_;
  std::vector<double> norms_;
  LpOptions opts_;
  std::size_t iterations_ = 0;
  std::size_t limit_ = 0;
};

double row_violation(const LpRow& row, const std::vector<double>& x) {
  double ax = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) ax += row.a[j] * x[j];
  switch (row.sense) {
    case Sense::le: return ax - row.b;
    case Sense::ge: return row.b - ax;
    case Sense::eq: return std::abs(ax - row.b);
  }
  return 0.0;
}

}  // namespace

LpResult solve_lp(const LpProblem& lp, LpOptions opts) {
  const std::size_t n = lp.c.size();
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  auto add = [&](const std::vector<double>& a, double rhs, double sign) {
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) scale = 1.0;
    std::vector<double> row(n);
    for (std::size_t j = 0; j < n; ++j) row[j] = sign * a[j] / scale;
    A.push_back(std::move(row));
    b.push_back(sign * rhs / scale);
  };
  for (const auto& row : lp.rows) {
    if (row.a.size() != n) throw DomainError("LP row length differs from the objective");
    if (row.sense != Sense::ge) add(row.a, row.b, 1.0);
    if (row.sense != Sense::le) add(row.a, row.b, -1.0);
  }
  double cscale = 0.0;
  for (double v : lp.c) cscale = std::max(cscale, std::abs(v));
  if (cscale == 0.0) cscale = 1.0;
  std::vector<double> c(n);
  for (std::size_t j = 0; j < n; ++j) c[j] = -lp.c[j] / cscale;

  // Column equilibration: costs spanning many orders of magnitude would
  // otherwise fall below the pricing tolerance.
  std::vector<double> colscale(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double s = std::abs(c[j]);
    for (const auto& row : A) s = std::max(s, std::abs(row[j]));
    colscale[j] = s > 0.0 ? s : 1.0;
    c[j] /= colscale[j];
    for (auto& row : A) row[j] /= colscale[j];
  }

  Tableau t(A, b, c, opts);
  LpResult res;
  res.status = t.solve(res.x, res.iterations);
  for (std::size_t j = 0; j < n; ++j) res.x[j] /= colscale[j];
  res.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) res.objective += lp.c[j] * res.x[j];
  if (res.status == LpStatus::infeasible) {
    res.worst_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lp.rows.size(); ++i) {
      const double v = row_violation(lp.rows[i], res.x);
      if (v > res.worst_violation) {
        res.worst_violation = v;
        res.worst_row = i;
      }
    }
  }
  return res;
}

}  // namespace robreg
