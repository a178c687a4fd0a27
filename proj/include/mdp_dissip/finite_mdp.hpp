#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "mdp_dissip/errors.hpp"
#include "mdp_dissip/matrix.hpp"

namespace mdp_dissip {

// Finite MDP with kernel indexed [action][state][next state] and stage cost
// indexed [state][action]. Rows of the kernel must be probability vectors.
class FiniteMdp {
 public:
  FiniteMdp(std::size_t num_states, std::size_t num_actions, std::vector<double> kernel,
            std::vector<double> cost)
      : s_(num_states), a_(num_actions), kernel_(std::move(kernel)), cost_(std::move(cost)) {
    if (s_ < 1 || a_ < 1) throw InputError("finite mdp: empty state or action set");
    if (kernel_.size() != a_ * s_ * s_ || cost_.size() != s_ * a_)
      throw InputError("finite mdp: kernel or cost size mismatch");
    for (std::size_t a = 0; a < a_; ++a)
      for (std::size_t s = 0; s < s_; ++s) {
        double sum = 0.0;
        for (std::size_t t = 0; t < s_; ++t) {
          const double p = xi(a, s, t);
          if (p < 0.0)
            throw InputError("finite mdp: negative kernel entry at action " +
                             std::to_string(a) + ", state " + std::to_string(s));
          sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12)
          throw InputError("finite mdp: kernel row (action " + std::to_string(a) +
                           ", state " + std::to_string(s) + ") sums to " +
                           std::to_string(sum));
      }
    for (double c : cost_)
      if (!std::isfinite(c)) throw InputError("finite mdp: non-finite cost entry");
  }

  std::size_t num_states() const { return s_; }
  std::size_t num_actions() const { return a_; }

  double xi(std::size_t action, std::size_t state, std::size_t next) const {
    return kernel_[(action * s_ + state) * s_ + next];
  }

  double stage_cost(std::size_t state, std::size_t action) const {
    return cost_[state * a_ + action];
  }

 private:
  std::size_t s_, a_;
  std::vector<double> kernel_;
  std::vector<double> cost_;
};

// Probability vector over states. Tiny negative round-off (above -1e-15) is
// clamped to zero; anything worse is rejected.
class SimplexDistribution {
 public:
  explicit SimplexDistribution(Vector probs) : p_(std::move(probs)) {
    if (p_.empty()) throw InputError("simplex distribution: empty");
    double sum = 0.0;
    for (double& v : p_) {
      if (v < 0.0) {
        if (v < -1e-15) throw InputError("simplex distribution: negative entry");
        v = 0.0;
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw InputError("simplex distribution: mass " + std::to_string(sum));
  }

  static SimplexDistribution uniform(std::size_t n) {
    return SimplexDistribution(Vector(n, 1.0 / static_cast<double>(n)));
  }

  static SimplexDistribution dirac(std::size_t n, std::size_t at) {
    if (at >= n) throw InputError("simplex distribution: dirac index out of range");
    Vector p(n, 0.0);
    p[at] = 1.0;
    return SimplexDistribution(std::move(p));
  }

  std::size_t dim() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const Vector& probs() const { return p_; }

 private:
  Vector p_;
};

struct DeterministicPolicy {
  std::vector<std::size_t> action;  // one action index per state
};

inline void check_policy(const DeterministicPolicy& pi, const FiniteMdp& mdp) {
  if (pi.action.size() != mdp.num_states())
    throw InputError("policy: wrong number of states");
  for (std::size_t a : pi.action)
    if (a >= mdp.num_actions()) throw InputError("policy: action index out of range");
}

inline double expectation(const SimplexDistribution& rho, const Vector& values) {
  if (rho.dim() != values.size()) throw InputError("expectation: length mismatch");
  return dot(rho.probs(), values);
}

// Stage cost of following pi, one value per state.
inline Vector policy_cost(const DeterministicPolicy& pi, const FiniteMdp& mdp) {
  check_policy(pi, mdp);
  Vector c(mdp.num_states());
  for (std::size_t s = 0; s < c.size(); ++s) c[s] = mdp.stage_cost(s, pi.action[s]);
  return c;
}

// Row-stochastic closed-loop transition matrix p[s][s'] under pi.
inline Matrix transition_matrix(const DeterministicPolicy& pi, const FiniteMdp& mdp) {
  check_policy(pi, mdp);
  const std::size_t n = mdp.num_states();
  Matrix p(n, n);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = 0; t < n; ++t) p(s, t) = mdp.xi(pi.action[s], s, t);
  return p;
}

// One step of the distribution flow: rho'[t] = sum_s rho[s] p[s][t].
inline SimplexDistribution apply_transition(const SimplexDistribution& rho,
                                            const DeterministicPolicy& pi,
                                            const FiniteMdp& mdp) {
  check_policy(pi, mdp);
  if (rho.dim() != mdp.num_states()) throw InputError("apply_transition: dimension mismatch");
  const std::size_t n = mdp.num_states();
  Vector next(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    const double mass = rho[s];
    if (mass == 0.0) continue;
    for (std::size_t t = 0; t < n; ++t) next[t] += mass * mdp.xi(pi.action[s], s, t);
  }
  return SimplexDistribution(std::move(next));
}

namespace detail {

inline std::vector<char> reachable(const Matrix& p, bool reverse) {
  const std::size_t n = p.rows();
  std::vector<char> seen(n, 0);
  std::deque<std::size_t> queue{0};
  seen[0] = 1;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v = 0; v < n; ++v) {
      const double w = reverse ? p(v, u) : p(u, v);
      if (w > 0.0 && !seen[v]) {
        seen[v] = 1;
        queue.push_back(v);
      }
    }
  }
  return seen;
}

}  // namespace detail

// Ergodic here means irreducible and aperiodic: every state reaches every
// other, and the gcd of cycle lengths is one (computed from BFS level
// differences over positive-probability edges).
inline bool is_ergodic(const Matrix& p) {
  if (!p.square() || p.rows() == 0) throw InputError("is_ergodic: bad matrix");
  const std::size_t n = p.rows();
  const auto fwd = detail::reachable(p, false);
  const auto bwd = detail::reachable(p, true);
  for (std::size_t s = 0; s < n; ++s)
    if (!fwd[s] || !bwd[s]) return false;

  std::vector<long> level(n, -1);
  std::deque<std::size_t> queue{0};
  level[0] = 0;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v = 0; v < n; ++v)
      if (p(u, v) > 0.0 && level[v] < 0) {
        level[v] = level[u] + 1;
        queue.push_back(v);
      }
  }
  long g = 0;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (p(u, v) > 0.0) g = std::gcd(g, level[u] + 1 - level[v]);
  return std::abs(g) == 1;
}

// Stationary distribution of the chain under pi by power iteration from the
// uniform distribution. The final fixed-point residual must clear 1e-10,
// otherwise the chain is treated as lacking a unique attracting stationary
// distribution.
inline SimplexDistribution stationary_distribution(const DeterministicPolicy& pi,
                                                   const FiniteMdp& mdp) {
  const Matrix p = transition_matrix(pi, mdp);
  const std::size_t n = mdp.num_states();
  Vector rho(n, 1.0 / static_cast<double>(n));
  const std::size_t max_iter = 1000000;
  for (std::size_t it = 0; it < max_iter; ++it) {
    Vector next(n, 0.0);
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t t = 0; t < n; ++t) next[t] += rho[s] * p(s, t);
    double step = 0.0;
    for (std::size_t t = 0; t < n; ++t) step = std::max(step, std::abs(next[t] - rho[t]));
    rho = std::move(next);
    if (step <= 1e-12) break;
  }
  double residual = 0.0;
  {
    Vector next(n, 0.0);
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t t = 0; t < n; ++t) next[t] += rho[s] * p(s, t);
    for (std::size_t t = 0; t < n; ++t) residual = std::max(residual, std::abs(next[t] - rho[t]));
  }
  if (residual > 1e-10)
    throw UniquenessError("stationary_distribution: power iteration residual " +
                          std::to_string(residual));
  return SimplexDistribution(std::move(rho));
}

struct SteadyStateSolution {
  DeterministicPolicy policy;
  SimplexDistribution rho_star;
  double steady_cost;              // long-run average cost of the best policy
  std::size_t skipped_policies;    // non-ergodic candidates left out
};

// Exhaustive minimization of the stationary average cost over deterministic
// policies. Only ergodic closed loops are admitted; ties keep the
// lexicographically smallest policy (enumeration order guarantees it).
inline SteadyStateSolution solve_steady_state(const FiniteMdp& mdp) {
  const std::size_t s = mdp.num_states(), a = mdp.num_actions();
  if (static_cast<double>(s) * std::log(static_cast<double>(a)) > std::log(1e6) + 1e-9)
    throw SizeError("solve_steady_state: policy space exceeds 1e6");

  std::vector<std::size_t> actions(s, 0);
  bool found = false;
  std::size_t skipped = 0;
  DeterministicPolicy best_policy;
  Vector best_rho;
  double best_cost = 0.0;
  while (true) {
    DeterministicPolicy pi{actions};
    if (is_ergodic(transition_matrix(pi, mdp))) {
      const SimplexDistribution rho = stationary_distribution(pi, mdp);
      const double cost = expectation(rho, policy_cost(pi, mdp));
      if (!found || cost < best_cost) {
        found = true;
        best_policy = pi;
        best_rho = rho.probs();
        best_cost = cost;
      }
    } else {
      ++skipped;
    }
    // odometer increment, lexicographic order
    std::size_t i = s;
    while (i > 0) {
      --i;
      if (++actions[i] < a) break;
      actions[i] = 0;
      if (i == 0) {
        if (!found)
          throw NoSolutionError("solve_steady_state: no ergodic deterministic policy");
        return SteadyStateSolution{best_policy, SimplexDistribution(best_rho), best_cost,
                                   skipped};
      }
    }
  }
}

struct AverageCostSolution {
  double gain = 0.0;          // optimal long-run average cost
  Vector bias;                // differential value, zero at state 0
  DeterministicPolicy policy; // greedy policy at the fixed point
  double residual = 0.0;      // max-norm defect of the optimality equation
};

// Relative value iteration for the average-cost optimality equation
//   gain + h(s) = min_a [ cost(s,a) + sum_t xi[t|s,a] h(t) ].
// Runs on the damped kernel (1-tau) xi + tau id, which has the same gain and
// a bias scaled by 1/(1-tau); damping makes the iteration contract even on
// periodic chains. The returned bias is rescaled to the original kernel and
// the residual is measured there too.
inline AverageCostSolution relative_value_iteration(const FiniteMdp& mdp,
                                                    double span_tolerance = 1e-12,
                                                    std::size_t max_iterations = 1000000) {
  const std::size_t n = mdp.num_states(), na = mdp.num_actions();
  const double tau = 0.5;
  Vector v(n, 0.0);
  double gain = 0.0;
  bool converged = false;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    Vector w(n);
    for (std::size_t s = 0; s < n; ++s) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < na; ++a) {
        double q = mdp.stage_cost(s, a);
        for (std::size_t t = 0; t < n; ++t) q += (1.0 - tau) * mdp.xi(a, s, t) * v[t];
        best = std::min(best, q);
      }
      w[s] = best + tau * v[s];
    }
    double lo = w[0] - v[0], hi = lo;
    for (std::size_t s = 1; s < n; ++s) {
      lo = std::min(lo, w[s] - v[s]);
      hi = std::max(hi, w[s] - v[s]);
    }
    if (hi - lo < span_tolerance) {
      gain = 0.5 * (hi + lo);
      for (std::size_t s = 0; s < n; ++s) v[s] = w[s] - w[0];
      converged = true;
      break;
    }
    for (std::size_t s = 0; s < n; ++s) v[s] = w[s] - w[0];
  }
  if (!converged)
    throw MultichainError("relative_value_iteration: span did not contract; "
                          "gain may not be constant across states");

  AverageCostSolution sol;
  sol.gain = gain;
  sol.bias.resize(n);
  for (std::size_t s = 0; s < n; ++s) sol.bias[s] = (1.0 - tau) * v[s];
  sol.policy.action.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_a = 0;
    for (std::size_t a = 0; a < na; ++a) {
      double q = mdp.stage_cost(s, a);
      for (std::size_t t = 0; t < n; ++t) q += mdp.xi(a, s, t) * sol.bias[t];
      if (q < best) {
        best = q;
        best_a = a;
      }
    }
    sol.policy.action[s] = best_a;
    sol.residual = std::max(sol.residual, std::abs(best - gain - sol.bias[s]));
  }
  return sol;
}

// Bias value of a distribution: the summed transient excess cost
//   sum_k ( E_{rho_k}[cost under pi] - steady_cost ),
// accumulated until 20 consecutive increments fall below 1e-10.
inline double bias_value(const SimplexDistribution& rho0, const DeterministicPolicy& pi,
                         const FiniteMdp& mdp, double steady_cost,
                         std::size_t max_terms = 1000000) {
  check_policy(pi, mdp);
  const Vector cost = policy_cost(pi, mdp);
  SimplexDistribution rho = rho0;
  double total = 0.0;
  std::size_t quiet = 0;
  for (std::size_t k = 0; k < max_terms; ++k) {
    const double term = expectation(rho, cost) - steady_cost;
    total += term;
    if (!std::isfinite(total) || std::abs(total) > 1e12)
      throw DivergenceError("bias_value: partial sums diverge");
    quiet = std::abs(term) < 1e-10 ? quiet + 1 : 0;
    if (quiet >= 20) return total;
    rho = apply_transition(rho, pi, mdp);
  }
  throw DivergenceError("bias_value: series did not settle");
}

struct TelescopingReport {
  bool holds = true;
  double max_violation = 0.0;
  // Steps where the expected stage cost dips below the steady-state cost.
  std::vector<std::size_t> negative_excess_steps;
};

// Checks the primitive one-step identity of the bias functional along a
// trajectory: V[rho_{k+1}] - V[rho_k] = -(E_{rho_k}[cost] - steady_cost).
inline TelescopingReport telescoping_check(const SimplexDistribution& rho0,
                                           const DeterministicPolicy& pi,
                                           const FiniteMdp& mdp, double steady_cost,
                                           std::size_t steps, double tolerance = 1e-8) {
  check_policy(pi, mdp);
  const Vector cost = policy_cost(pi, mdp);
  TelescopingReport rep;
  SimplexDistribution rho = rho0;
  double v_here = bias_value(rho, pi, mdp, steady_cost);
  for (std::size_t k = 0; k < steps; ++k) {
    const double excess = expectation(rho, cost) - steady_cost;
    if (excess < 0.0) rep.negative_excess_steps.push_back(k);
    SimplexDistribution next = apply_transition(rho, pi, mdp);
    const double v_next = bias_value(next, pi, mdp, steady_cost);
    const double defect = std::abs((v_next - v_here) + excess);
    rep.max_violation = std::max(rep.max_violation, defect);
    rho = std::move(next);
    v_here = v_next;
  }
  rep.holds = rep.max_violation <= tolerance;
  return rep;
}

// Per-state stage cost rotated by a linear storage lambda:
//   c[s] = cost(s, pi(s)) + sum_t xi[t|s,pi(s)] lambda(t) - lambda(s).
inline Vector linear_rotation(const Vector& lambda, const DeterministicPolicy& pi,
                              const FiniteMdp& mdp) {
  check_policy(pi, mdp);
  if (lambda.size() != mdp.num_states()) throw InputError("linear_rotation: length mismatch");
  const std::size_t n = mdp.num_states();
  Vector out(n);
  for (std::size_t s = 0; s < n; ++s) {
    double drift = -lambda[s];
    for (std::size_t t = 0; t < n; ++t) drift += mdp.xi(pi.action[s], s, t) * lambda[t];
    out[s] = mdp.stage_cost(s, pi.action[s]) + drift;
  }
  return out;
}

struct WitnessReport {
  double stationary_mean = 0.0;     // of the rotated excess cost, zero by stationarity
  std::size_t support_size = 0;     // states carrying stationary mass
  bool has_negative = false;        // rotated excess strictly negative somewhere on support
  bool all_zero = false;            // rotated excess vanishes on the whole support
  // Stationarity forces one of the two above, so no storage can make the
  // rotated excess cost nonnegative on the support with a strict surplus.
  bool precludes_strict_surplus = false;
};

// Demonstrates, for a concrete storage candidate lambda, why the rotated
// excess cost c[s] = cost(s,pi(s)) - steady_cost + drift of lambda cannot be
// nonnegative with some strictly positive value on the stationary support:
// its stationary mean is exactly zero.
inline WitnessReport stationarity_witness(const FiniteMdp& mdp, const DeterministicPolicy& pi,
                                    const Vector& lambda) {
  const SimplexDistribution rho_star = stationary_distribution(pi, mdp);
  const double steady_cost = expectation(rho_star, policy_cost(pi, mdp));
  Vector rotated = linear_rotation(lambda, pi, mdp);
  for (double& c : rotated) c -= steady_cost;

  double scale = 1.0;
  for (double l : lambda) scale = std::max(scale, std::abs(l));
  const double tol = 1e-10 * scale;

  WitnessReport rep;
  rep.stationary_mean = expectation(rho_star, rotated);
  double max_abs_on_support = 0.0;
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    if (rho_star[s] <= 1e-12) continue;
    ++rep.support_size;
    max_abs_on_support = std::max(max_abs_on_support, std::abs(rotated[s]));
    if (rotated[s] < -tol) rep.has_negative = true;
  }
  rep.all_zero = max_abs_on_support <= tol;
  rep.precludes_strict_surplus = rep.has_negative || rep.all_zero;
  return rep;
}

}  // namespace mdp_dissip
