#include "robreg/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include "robreg/adaptive.hpp"
#include "robreg/checks.hpp"
#include "robreg/level_payoff.hpp"
#include "robreg/process.hpp"
#include "robreg/robust.hpp"
#include "robreg/stopping.hpp"
#include "robreg/tree_oracle.hpp"
#include "robreg/worstcase.hpp"

namespace robreg {

namespace {

// Tolerances, pinned here so the verdicts are reproducible.
constexpr double kC1Tol = 1e-6;
constexpr double kC2Tol = 1e-8;
constexpr double kC3RelTol = 1e-6;
constexpr double kC3InteriorMass = 1e-6;
constexpr double kC4DualRel = 1e-4;
constexpr double kC4Cs = 1e-6;
constexpr double kC5Floor = -1e3;
constexpr double kC6Ratio = 10.0;
constexpr double kC7Tol = 1e-9;
constexpr double kC8Tol = 1e-8;

struct Check {
  bool ok = true;
  std::ostringstream detail;

  Check() { detail.precision(10); }
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << "FAILED: " << what << "; ";
    }
  }
};

// Quadratic pair, prior 0.6: L* = 0.5, lambda* = 0.1, guarantee 0.1.
void criterion1(Check& c) {
  const auto qp = quadratic_pair(1.0, 1.0, 1.0);
  const LevelGrid grid(2.0, 2001);
  const Belief mu0(0.6);
  const auto r = compute_robust(qp.agent, qp.principal, mu0, grid);
  const auto w = solve_badnews_lp(qp.agent, qp.principal, r.mechanism, mu0, grid);
  c.detail << "L*=" << r.L_star << " lambda*=" << r.lambda_star << " guarantee=" << r.guarantee
           << " lp=" << w.value << "; ";
  c.require(std::abs(r.L_star - 0.5) <= grid.step(), "L* within one step of 0.5");
  c.require(std::abs(r.lambda_star - 0.1) <= kC1Tol, "lambda* = 0.1");
  c.require(std::abs(r.guarantee - 0.1) <= kC1Tol, "guarantee = 0.1");
  c.require(std::abs(w.value - 0.1) <= kC1Tol, "bad-news worst case = 0.1");
}

// 200 random trees per payoff pair, each on its own random grid.
void criterion2(Check& c) {
  struct Case {
    const char* name;
    PayoffPair pair;
    double mu0;
  };
  const Case cases[] = {{"quadratic", quadratic_pair(1.0, 1.0, 1.0), 0.6},
                        {"cara(1,3)", cara_pair(1.0, 3.0), 0.8}};
  for (const auto& cs : cases) {
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<std::size_t> levels(2, 20);
    std::uniform_real_distribution<double> lmax(0.25, 2.0);
    double worst_margin = std::numeric_limits<double>::infinity();
    std::size_t failures = 0, positive_quota = 0;
    for (std::size_t t = 0; t < 200; ++t) {
      const LevelGrid grid(lmax(rng), levels(rng));
      const Belief mu0(cs.mu0);
      const auto r = compute_robust(cs.pair.agent, cs.pair.principal, mu0, grid);
      if (r.L_index > 0) ++positive_quota;
      const auto proc = random_tree(mu0, grid, 4, 1000 + t);
      const double v =
          principal_value(solve_stopping(proc, cs.pair.agent, r.mechanism), cs.pair.principal, r.mechanism);
      worst_margin = std::min(worst_margin, v - r.guarantee);
      if (v < r.guarantee - kC2Tol) ++failures;
    }
    c.detail << cs.name << ": min(value - guarantee)=" << worst_margin << " failures=" << failures
             << " trees with L*>0=" << positive_quota << "; ";
    c.require(failures == 0, std::string(cs.name) + " trees stay above the guarantee");
  }
}

// Small instances: the exact tree worst case against the bad-news LP.
void criterion3(Check& c) {
  std::size_t instances = 0, considered = 0, mass_fail = 0, value_fail = 0;
  double worst_rel = 0.0, worst_mass = 0.0;
  for (double ga : {0.5, 1.0}) {
    for (double gp : {2.0, 2.5, 3.0}) {
      for (double l_max : {0.5, 0.75, 1.0}) {
        for (double m0 : {0.55, 0.6, 0.7, 0.8}) {
          for (int mech = 0; mech < 2; ++mech) {
            ++considered;
            const auto pair = cara_pair(ga, gp);
            const Mechanism m = mech == 0 ? Mechanism(ZeroTax{}) : Mechanism(LinearTax{0.2});
            const LevelGrid grid(l_max, 3);
            const Belief mu0(m0);
            if (!principal_prefers_earlier(pair.agent, pair.principal, m, grid).holds) continue;
            if (!check_assumptions(pair.agent, pair.principal, grid).all()) continue;
            const auto w = solve_badnews_lp(pair.agent, pair.principal, m, mu0, grid);
            std::vector<std::vector<double>> supports;
            for (std::size_t j = 0; j < grid.size(); ++j) {
              std::vector<double> s{0.0, m0, w.process.cont_belief[j], 1.0};
              std::sort(s.begin(), s.end());
              s.erase(std::unique(s.begin(), s.end()), s.end());
              supports.push_back(s);
            }
            const auto t = tree_oracle_worst_case(pair.agent, pair.principal, m, grid, mu0, supports);
            const double scale = std::max({1.0, LevelPayoff::raw(pair.principal, grid).scale(),
                                           LevelPayoff::raw(pair.agent, grid).scale()});
            const double rel = std::abs(t.value - w.value) / scale;
            worst_rel = std::max(worst_rel, rel);
            worst_mass = std::max(worst_mass, t.max_interior_positive_mass);
            if (rel > kC3RelTol) ++value_fail;
            if (t.max_interior_positive_mass > kC3InteriorMass) ++mass_fail;
            ++instances;
          }
        }
      }
    }
  }
  c.detail << "instances=" << instances << " of " << considered
           << " max|oracle-lp|/scale=" << worst_rel << " max interior positive mass=" << worst_mass << "; ";
  c.require(instances >= 30, "at least 30 instances pass the premise");
  c.require(value_fail == 0, "oracle value matches the LP");
  c.require(mass_fail == 0, "pre-terminal stopping only at belief 0");
}

// CARA(1,3), zero tax: indifference curve, duality gap, complementary slackness.
void criterion4(Check& c) {
  const auto pair = cara_pair(1.0, 3.0);
  const LevelGrid grid(2.0, 2001);
  const Belief mu0(0.6);
  const Mechanism m = ZeroTax{};
  const auto ind = indifference_G(pair.agent, pair.principal, m, mu0, grid);
  const double h = grid.step();
  auto mu_hat = [](double l) { return 1.0 / (1.0 + std::exp(-2.0 * l)); };
  std::size_t off = 0;
  for (std::size_t j = ind.lower_index; j + 1 < grid.size(); ++j) {
    const double lam = ind.worst.process.cont_belief[j];
    const double l = grid[j];
    if (lam < mu_hat(l - 2.0 * h) - 1e-12 || lam > mu_hat(l + 2.0 * h) + 1e-12) ++off;
  }
  const auto lp = build_obedience_lp(pair.agent, pair.principal, m, mu0, grid);
  const LpResult res = solve_lp(lp.to_lp());
  const double primal = lp.objective(res.x);
  const auto cert = dual_certificate(lp, res.x, kC4Cs);
  const double rel = std::abs(primal - cert.dual_value) / std::abs(primal);
  c.detail << "lower level=" << grid[ind.lower_index] << " beliefs off the curve=" << off
           << " lp=" << primal << " dual=" << cert.dual_value << " rel gap=" << rel
           << " cs violation=" << cert.max_cs_violation << " pivots=" << res.iterations << "; ";
  c.require(!ind.fell_back, "indifference construction succeeds");
  c.require(off == 0, "continuation beliefs within two steps of 1/(1+exp(-2l))");
  c.require(res.status == LpStatus::optimal, "LP solved");
  c.require(rel <= kC4DualRel, "duality gap");
  c.require(cert.max_cs_violation <= kC4Cs, "complementary slackness");
}

// Lower bound on the zero-tax worst case when gp < 2 ga, from the continuous
// bad-news process with stopping density 2 ga mu0 exp(-2 ga l) past the one-shot level.
double cara_bounded_limit(double ga, double gp, double mu0) {
  const double lhat = std::log(mu0 / (1.0 - mu0)) / (2.0 * ga);
  const double e = std::exp((gp - 2.0 * ga) * lhat);
  return -mu0 - 2.0 * ga * mu0 * e / (2.0 * ga - gp) - mu0 * e;
}

void criterion5(Check& c) {
  const double mu0 = 0.6;
  const std::vector<double> sweep{2.0, 4.0, 8.0, 16.0};
  auto run = [&](double gp) {
    const auto pair = cara_pair(1.0, gp);
    std::vector<double> v;
    for (double l : sweep) v.push_back(solve_badnews_lp(pair.agent, pair.principal, ZeroTax{}, Belief(mu0), LevelGrid(l, 401)).value);
    return v;
  };
  const auto div = run(3.0);
  const auto bdd = run(1.5);
  const double floor = cara_bounded_limit(1.0, 1.5, mu0);
  c.detail << "gp=3:";
  for (double v : div) c.detail << ' ' << v;
  c.detail << "; gp=1.5:";
  for (double v : bdd) c.detail << ' ' << v;
  c.detail << " (limit bound " << floor << "); ";
  bool decreasing = true;
  for (std::size_t i = 1; i < div.size(); ++i) decreasing = decreasing && div[i] < div[i - 1];
  c.require(decreasing, "strictly decreasing for gp=3");
  c.require(div.back() < kC5Floor, "below -1e3 at l_max=16");
  c.require(std::all_of(bdd.begin(), bdd.end(), [&](double v) { return v >= floor; }),
            "bounded below for gp=1.5");
}

// Single split to {0, 0.51}; the prior must lie inside, so mu0 = 0.5.
void criterion6(Check& c) {
  const auto qp = quadratic_pair(1.0, 1.0, 1.0);
  const Belief mu0(0.5);
  const double hi = 0.5 + 0.01;
  std::vector<double> v;
  for (double l : {10.0, 100.0}) {
    const LevelGrid grid(l, 1001);
    const auto sol = solve_stopping(level0_split(mu0, 0.0, hi, grid), qp.agent, ZeroTax{});
    v.push_back(principal_value(sol, qp.principal, ZeroTax{}));
  }
  c.detail << "value(10)=" << v[0] << " value(100)=" << v[1] << " ratio=" << v[1] / v[0] << "; ";
  c.require(v[0] < 0.0 && v[1] < v[0], "values negative and decreasing");
  c.require(std::abs(v[1]) >= kC6Ratio * std::abs(v[0]), "magnitude grows at least tenfold");
}

// Two CARA agents against an independent pointwise-min scan.
void criterion7(Check& c) {
  const PayoffSpec principal = Cara{3.0};
  const std::vector<PayoffSpec> agents{Cara{1.0}, Cara{2.0}};
  const LevelGrid grid(2.0, 2001);
  const double mu0 = 0.6;
  const auto joint = compute_joint_robust(AmbiguitySet(agents), principal, Belief(mu0), grid);
  double oracle = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double l = grid[j];
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& a : agents) {
      lo = std::min(lo, a.indirect(mu0, l) - a.indirect(mu0, 0.0) + principal.indirect(mu0, l));
    }
    oracle = std::max(oracle, lo);
  }
  c.detail << "joint=" << joint.guarantee << " scan=" << oracle << " L=" << joint.L_star;
  bool below = true;
  for (const auto& a : agents) {
    const auto single = compute_robust(a, principal, Belief(mu0), grid);
    c.detail << " single=" << single.guarantee;
    below = below && joint.guarantee <= single.guarantee;
  }
  c.detail << "; ";
  c.require(std::abs(joint.guarantee - oracle) <= kC7Tol, "matches the scan oracle");
  c.require(below, "below each singleton guarantee");
}

void criterion8(Check& c) {
  const auto pair = cara_pair(1.0, 3.0);
  const Belief mu0(0.6);
  {
    const LevelGrid grid(2.0, 2001);
    const auto stat = compute_robust(pair.agent, pair.principal, mu0, grid);
    const auto pol = solve_adaptive_quota(PrincipalTree::no_learning(mu0, grid), pair.agent, pair.principal);
    const bool same = pol.joint.size() == 1 && pol.joint[0].level == stat.L_star &&
                      pol.lambda_adaptive == stat.lambda_star && pol.value == stat.guarantee;
    c.detail << "degenerate: quota " << (pol.joint.empty() ? -1.0 : pol.joint[0].level) << " vs " << stat.L_star
             << ", lambda " << pol.lambda_adaptive << " vs " << stat.lambda_star << ", value " << pol.value
             << " vs " << stat.guarantee << "; ";
    c.require(same, "degenerate tree reproduces the static mechanism bitwise");
  }
  // Optimistic prior on a short grid, so the quota varies across the tree.
  const Belief prior(0.8);
  const LevelGrid grid(1.0, 9);
  const auto tree = PrincipalTree::binomial(prior, grid, 0.7, 8);
  const auto pol = solve_adaptive_quota(tree, pair.agent, pair.principal);
  const auto stat = compute_robust(pair.agent, pair.principal, prior, grid);
  c.detail << "binomial DP=" << pol.value << " static=" << stat.guarantee << "; ";
  c.require(pol.value >= stat.guarantee, "binomial DP value at least the static guarantee");

  double worst = std::numeric_limits<double>::infinity();
  std::size_t below = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto agent_proc = refine_process(tree, random_experiments(tree, 7000 + s));
    const double v = evaluate_adaptive(pol, agent_proc, pair.agent, pair.principal).value;
    worst = std::min(worst, v - pol.value);
    if (v < pol.value - kC8Tol) ++below;
  }
  c.detail << "refinements: min(value - DP)=" << worst << " below=" << below << "; ";
  c.require(below == 0, "refinements never undercut the DP value");
}

struct Entry {
  int id;
  const char* title;
  double budget;
  bool quick;
  std::function<void(Check&)> run;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> s{
      {1, "guarantee attainment", 10.0, true, criterion1},
      {2, "max-min property on random trees", 60.0, false, criterion2},
      {3, "tree oracle agrees with the bad-news LP", 300.0, false, criterion3},
      {4, "indifference construction and duality", 30.0, false, criterion4},
      {5, "divergence under zero tax", 120.0, true, criterion5},
      {6, "unbounded loss from a single split", 5.0, true, criterion6},
      {7, "joint robustness over two CARA agents", 5.0, true, criterion7},
      {8, "adaptive quota on principal trees", 60.0, true, criterion8},
  };
  return s;
}

}  // namespace

std::vector<int> acceptance_ids(bool quick) {
  std::vector<int> out;
  for (const auto& s : entries()) {
    if (!quick || s.quick) out.push_back(s.id);
  }
  return out;
}

CriterionResult run_criterion(int id) {
  const auto& all = entries();
  const auto it = std::find_if(all.begin(), all.end(), [&](const Entry& s) { return s.id == id; });
  if (it == all.end()) throw std::out_of_range("no acceptance criterion " + std::to_string(id));
  CriterionResult r{id, it->title, false, 0.0, it->budget, ""};
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    it->run(c);
  } catch (const std::exception& e) {
    c.require(false, std::string("exception: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.require(r.seconds < r.budget_seconds, "runtime budget");
  r.passed = c.ok;
  r.detail = c.detail.str();
  return r;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os.precision(3);
  os << (r.passed ? "PASS" : "FAIL") << " [" << r.id << "] " << r.title << " (" << std::fixed << r.seconds
     << " s, budget " << r.budget_seconds << " s): " << r.detail;
  return os.str();
}

std::vector<CriterionResult> run_acceptance(bool quick, std::ostream& os) {
  std::vector<CriterionResult> out;
  for (int id : acceptance_ids(quick)) {
    out.push_back(run_criterion(id));
    os << format_result(out.back()) << '\n' << std::flush;
  }
  return out;
}

}  // namespace robreg
