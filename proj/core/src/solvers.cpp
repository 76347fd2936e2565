#include "netorch/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "netorch/errors.hpp"

namespace netorch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::kInvalidProblem, message);
}

void require_tol(double tol) { require(std::isfinite(tol) && tol > 0, "tol must be > 0"); }

// Per-BS transmitted power sums P_l = sum_k p_{lk}.
std::vector<double> bs_power_sums(const Matrix& p) {
  std::vector<double> sums(p.rows, 0.0);
  for (std::size_t l = 0; l < p.rows; ++l) {
    for (std::size_t k = 0; k < p.cols; ++k) sums[l] += p(l, k);
  }
  return sums;
}

// Interference-plus-noise denominator for every UE, using the identity
// D_jk = sum_l beta_{l->(j,k)} P_l - beta_{j->(j,k)} p_jk + noise
// (the served signal is excluded from the sum; interference gains do not
// depend on which UE the interfering BS serves).
std::vector<double> denominators(const PowerProblem& pr, const Matrix& p) {
  const std::size_t L = pr.num_cells, K = pr.num_ues;
  const std::vector<double> sums = bs_power_sums(p);
  std::vector<double> d(L * K);
  for (std::size_t j = 0; j < L; ++j) {
    for (std::size_t k = 0; k < K; ++k) {
      const std::size_t col = j * K + k;
      double acc = pr.noise;
      for (std::size_t l = 0; l < L; ++l) acc += pr.cross_gain(l, col) * sums[l];
      d[col] = acc - pr.cross_gain(j, col) * p(j, k);
    }
  }
  return d;
}

}  // namespace

void validate_problem(const BandwidthProblem& problem) {
  require(!problem.effective_snr.empty(), "bandwidth problem needs at least one UE");
  require(std::isfinite(problem.total_bw) && problem.total_bw > 0, "total_bw must be > 0");
  for (double c : problem.effective_snr) {
    require(std::isfinite(c) && c > 0, "every effective SNR must be > 0");
  }
}

void validate_problem(const PowerProblem& problem) {
  const std::size_t L = problem.num_cells, K = problem.num_ues;
  require(L >= 1 && K >= 1, "power problem needs at least one cell and one UE");
  require(problem.signal_gain.rows == L && problem.signal_gain.cols == K,
          "signal_gain must be L x K");
  require(problem.cross_gain.rows == L && problem.cross_gain.cols == L * K,
          "cross_gain must be L x (L*K)");
  require(std::isfinite(problem.noise) && problem.noise > 0, "noise must be > 0");
  require(std::isfinite(problem.p_max) && problem.p_max > 0, "p_max must be > 0");
  for (double b : problem.cross_gain.data) {
    require(std::isfinite(b) && b >= 0, "cross gains must be >= 0");
  }
  for (std::size_t j = 0; j < L; ++j) {
    for (std::size_t k = 0; k < K; ++k) {
      const double a = problem.signal_gain(j, k);
      const double own = problem.cross_gain(j, j * K + k);
      require(std::isfinite(a) && a > 0, "signal gains must be > 0");
      require(own > 0, "each UE's own-cell gain must be > 0");
      require(a >= own, "coherent gain must dominate the own-cell cross gain");
    }
  }
}

std::vector<double> sinr_all(const PowerProblem& problem, const Matrix& p) {
  validate_problem(problem);
  if (p.rows != problem.num_cells || p.cols != problem.num_ues) {
    throw Error(ErrorCode::kShapeMismatch,
                "power matrix must be " + std::to_string(problem.num_cells) + " x " +
                    std::to_string(problem.num_ues));
  }
  for (double v : p.data) require(std::isfinite(v) && v >= 0, "powers must be >= 0");
  const std::vector<double> d = denominators(problem, p);
  std::vector<double> sinr(d.size());
  for (std::size_t j = 0; j < problem.num_cells; ++j) {
    for (std::size_t k = 0; k < problem.num_ues; ++k) {
      const std::size_t col = j * problem.num_ues + k;
      sinr[col] = problem.signal_gain(j, k) * p(j, k) / d[col];
    }
  }
  return sinr;
}

Matrix as_power_matrix(const PowerProblem& problem, const std::vector<double>& values) {
  if (values.size() != problem.num_cells * problem.num_ues) {
    throw Error(ErrorCode::kShapeMismatch, "allocation length must be L*K");
  }
  Matrix p(problem.num_cells, problem.num_ues);
  p.data = values;
  return p;
}

double pf_marginal_utility(double c, double b) {
  const double x = c / b;
  // 1 - x/((1+x)ln(1+x)) cancels catastrophically for small x; switch to
  // the series x/2 - 5x^2/12 + 3x^3/8 there (next term is O(x^4)).
  double one_minus;
  if (x < 1e-4) {
    one_minus = x * (0.5 + x * (-5.0 / 12.0 + x * (3.0 / 8.0)));
  } else {
    one_minus = 1.0 - x / ((1.0 + x) * std::log1p(x));
  }
  return one_minus / b;
}

Allocation solve_bandwidth_pf(const BandwidthProblem& problem, double tol) {
  validate_problem(problem);
  require_tol(tol);
  const double B = problem.total_bw;
  const std::vector<double>& c = problem.effective_snr;
  const std::size_t K = c.size();

  Allocation out;
  if (K == 1) {
    out.values = {B};
    out.objective_value = pf_utility(problem, out.values);
    out.diagnostics = {{"lambda", pf_marginal_utility(c[0], B)}, {"outer_iterations", 0}};
    return out;
  }

  // b_k(lambda): the unique bandwidth where the marginal utility equals
  // lambda (marginal is strictly decreasing, +inf at 0+, -> 0 at inf).
  auto solve_b = [&](double ck, double lambda) {
    double hi = B;
    for (int grow = 0; grow < 600 && pf_marginal_utility(ck, hi) > lambda; ++grow) hi *= 2;
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (pf_marginal_utility(ck, mid) > lambda ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };

  // At lambda = min_k (max_k) marginal at the equal split, the total
  // demand sum_k b_k(lambda) is >= B (<= B), bracketing the multiplier.
  double lambda_lo = kInf, lambda_hi = -kInf;
  for (double ck : c) {
    const double m = pf_marginal_utility(ck, B / static_cast<double>(K));
    lambda_lo = std::min(lambda_lo, m);
    lambda_hi = std::max(lambda_hi, m);
  }

  std::vector<double> b(K, B / static_cast<double>(K));
  double lambda = lambda_hi;
  int outer = 0;
  double residual = 0.0;
  if (lambda_hi - lambda_lo > 1e-15 * lambda_hi) {
    for (outer = 1; outer <= 200; ++outer) {
      lambda = 0.5 * (lambda_lo + lambda_hi);
      double total = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        b[k] = solve_b(c[k], lambda);
        total += b[k];
      }
      residual = total - B;
      if (std::abs(residual) <= 1e-13 * B) break;
      (residual > 0 ? lambda_lo : lambda_hi) = lambda;
    }
  }

  double m_lo = kInf, m_hi = -kInf;
  for (std::size_t k = 0; k < K; ++k) {
    const double m = pf_marginal_utility(c[k], b[k]);
    m_lo = std::min(m_lo, m);
    m_hi = std::max(m_hi, m);
  }

  out.values = std::move(b);
  out.objective_value = pf_utility(problem, out.values);
  out.diagnostics = {
      {"lambda", lambda},
      {"outer_iterations", static_cast<double>(outer)},
      {"budget_residual_rel", std::abs(residual) / B},
      {"marginal_spread_rel", (m_hi - m_lo) / lambda},
  };
  return out;
}

Allocation solve_bandwidth_equal(const BandwidthProblem& problem) {
  validate_problem(problem);
  const std::size_t K = problem.effective_snr.size();
  Allocation out;
  out.values.assign(K, problem.total_bw / static_cast<double>(K));
  out.objective_value = pf_utility(problem, out.values);
  return out;
}

Allocation solve_power_maxmin(const PowerProblem& problem, double tol) {
  validate_problem(problem);
  require_tol(tol);
  const std::size_t L = problem.num_cells, K = problem.num_ues;
  const double P = problem.p_max;

  constexpr int kFixedPointCap = 10000;
  constexpr double kFixedPointTol = 1e-10;
  long total_fp_iterations = 0;

  // Standard-interference fixed point p <- t (I(p) + noise) / a from p = 0.
  // Iterates increase monotonically, so overshooting any BS budget proves
  // the target infeasible immediately.
  auto probe = [&](double t, Matrix& p) -> bool {
    p = Matrix(L, K, 0.0);
    Matrix next(L, K, 0.0);
    for (int iter = 1; iter <= kFixedPointCap; ++iter) {
      ++total_fp_iterations;
      const std::vector<double> d = denominators(problem, p);
      double max_delta = 0.0, max_power = 0.0;
      for (std::size_t j = 0; j < L; ++j) {
        double row_sum = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
          const double v = t * d[j * K + k] / problem.signal_gain(j, k);
          next(j, k) = v;
          row_sum += v;
          max_delta = std::max(max_delta, std::abs(v - p(j, k)));
          max_power = std::max(max_power, v);
        }
        if (row_sum > P * (1.0 + 1e-12)) return false;
      }
      std::swap(p, next);
      if (max_delta <= kFixedPointTol * std::max(max_power, 1e-300)) return true;
    }
    throw Error(ErrorCode::kNonConvergence,
                "max-min feasibility fixed point exceeded " +
                    std::to_string(kFixedPointCap) + " iterations at target " +
                    format_double(t));
  };

  // Upper bound on the achievable common SINR: the weakest UE with the
  // whole budget and zero interference.
  double t_hi = kInf;
  for (std::size_t j = 0; j < L; ++j) {
    for (std::size_t k = 0; k < K; ++k) {
      t_hi = std::min(t_hi, problem.signal_gain(j, k) * P / problem.noise);
    }
  }

  // Bisection tighter than the requested tol so that the reported target
  // is within tol and some BS budget ends up active to ~1e-7 relative.
  const double rel_width = std::min(tol, 1e-8);
  double t_lo = 0.0;
  Matrix p_best(L, K, 0.0);
  int steps = 0;
  double utilization = 0.0;
  for (steps = 0; steps < 200; ++steps) {
    if (t_lo > 0 && (t_hi - t_lo) <= rel_width * t_lo && utilization >= 1.0 - 1e-7) break;
    const double t_mid = 0.5 * (t_lo + t_hi);
    Matrix p;
    if (probe(t_mid, p)) {
      t_lo = t_mid;
      p_best = std::move(p);
      utilization = 0.0;
      for (double row_sum : bs_power_sums(p_best)) {
        utilization = std::max(utilization, row_sum / P);
      }
    } else {
      t_hi = t_mid;
    }
  }
  if (t_lo <= 0) {
    throw Error(ErrorCode::kNonConvergence, "max-min bisection found no feasible target");
  }

  const std::vector<double> sinr = sinr_all(problem, p_best);
  Allocation out;
  out.values = p_best.data;
  out.objective_value = *std::min_element(sinr.begin(), sinr.end());
  out.diagnostics = {
      {"target", t_lo},
      {"bisection_steps", static_cast<double>(steps)},
      {"bisection_width_rel", (t_hi - t_lo) / t_lo},
      {"fp_iterations", static_cast<double>(total_fp_iterations)},
      {"budget_utilization", utilization},
  };
  return out;
}

namespace {

// Scalar solve of w + nu e^w = v (strictly increasing left side) by
// safeguarded Newton inside the bracket [v - nu e^v, v].
double solve_dual_coordinate(double v, double nu) {
  double hi = v;
  double lo = v - nu * std::exp(v);
  double w = std::min(v, 0.0);
  for (int i = 0; i < 100; ++i) {
    const double e = std::exp(w);
    const double phi = w + nu * e - v;
    if (std::abs(phi) <= 1e-14 * (1.0 + std::abs(v))) break;
    (phi > 0 ? hi : lo) = w;
    const double newton = w - phi / (1.0 + nu * e);
    w = (newton > lo && newton < hi) ? newton : 0.5 * (lo + hi);
  }
  return w;
}

}  // namespace

Allocation solve_power_maxprod(const PowerProblem& problem, double tol) {
  validate_problem(problem);
  require_tol(tol);
  const std::size_t L = problem.num_cells, K = problem.num_ues;
  const std::size_t n = L * K;
  const double P = problem.p_max;
  const double floor_log = std::log(1e-12 * P);
  // Ascent iterates can propose huge q before projection; cap them so
  // exp() cannot overflow. Any admissible point has q <= log P, far below
  // the cap, so converged iterates never feel it.
  const double q_cap = std::log(P) + 46.0;  // e^46 ~ 1e20 above the budget

  auto exp_powers = [&](const std::vector<double>& q) {
    Matrix p(L, K);
    for (std::size_t i = 0; i < n; ++i) p.data[i] = std::exp(q[i]);
    return p;
  };

  // f(q) = sum log SINR(e^q) up to the constant sum log a; keeping the
  // constant makes the reported objective the true sum of log SINRs.
  auto objective = [&](const std::vector<double>& q) {
    const Matrix p = exp_powers(q);
    const std::vector<double> d = denominators(problem, p);
    double f = 0.0;
    for (std::size_t j = 0; j < L; ++j) {
      for (std::size_t k = 0; k < K; ++k) {
        f += std::log(problem.signal_gain(j, k)) + q[j * K + k] - std::log(d[j * K + k]);
      }
    }
    return f;
  };

  // Euclidean projection in q-space onto {sum_k e^{q_k} <= P, q >= floor}
  // per BS, by bisection on the dual variable nu (KKT: q + nu e^q = v on
  // unclamped coordinates).
  auto project_row = [&](std::vector<double>& q, std::size_t j) {
    double* row = q.data() + j * K;
    double sum = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      row[k] = std::min(std::max(row[k], floor_log), q_cap);
      sum += std::exp(row[k]);
    }
    if (sum <= P) return;
    auto excess = [&](double nu) {
      double s = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        s += std::exp(std::max(solve_dual_coordinate(row[k], nu), floor_log));
      }
      return s - P;
    };
    double nu_lo = 0.0, nu_hi = 1.0;
    for (int grow = 0; grow < 200 && excess(nu_hi) > 0; ++grow) {
      nu_lo = nu_hi;
      nu_hi *= 4.0;
    }
    double nu = nu_hi;
    for (int i = 0; i < 200; ++i) {
      nu = 0.5 * (nu_lo + nu_hi);
      const double e = excess(nu);
      if (std::abs(e) <= 1e-13 * P) break;
      (e > 0 ? nu_lo : nu_hi) = nu;
    }
    for (std::size_t k = 0; k < K; ++k) {
      row[k] = std::max(solve_dual_coordinate(row[k], nu), floor_log);
    }
  };
  auto project = [&](std::vector<double> q) {
    for (std::size_t j = 0; j < L; ++j) project_row(q, j);
    return q;
  };

  auto gradient = [&](const std::vector<double>& q) {
    const Matrix p = exp_powers(q);
    return maxprod_gradient_q(problem, p);
  };

  // Norm of the gradient projected onto the tangent cone of the active
  // constraints: on a saturated BS the outward normal in q-space is p
  // itself, and floor-clamped coordinates cannot decrease further.
  auto projected_gradient_norm = [&](const std::vector<double>& q,
                                     const std::vector<double>& g) {
    const Matrix p = exp_powers(q);
    double norm_sq = 0.0;
    for (std::size_t j = 0; j < L; ++j) {
      double sum = 0.0, gp = 0.0, pp = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        sum += p(j, k);
        gp += g[j * K + k] * p(j, k);
        pp += p(j, k) * p(j, k);
      }
      const bool saturated = sum >= P * (1.0 - 1e-9);
      const double mu = saturated ? std::max(0.0, gp / pp) : 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        double r = g[j * K + k] - mu * p(j, k);
        if (q[j * K + k] <= floor_log + 1e-12 && r < 0) r = 0;
        norm_sq += r * r;
      }
    }
    return std::sqrt(norm_sq);
  };

  std::vector<double> q(n, std::log(P / static_cast<double>(K)));
  q = project(q);
  double f = objective(q);
  std::vector<double> g = gradient(q);
  double pg = projected_gradient_norm(q, g);

  constexpr int kIterationCap = 5000;
  int iterations = 0;
  long backtracks = 0;
  std::vector<double> q_prev, g_prev;
  while (pg > tol && iterations < kIterationCap) {
    ++iterations;
    // Barzilai-Borwein step estimate after the first iteration; Armijo
    // still validates every step.
    double step = 1.0;
    if (!q_prev.empty()) {
      double ss = 0.0, sy = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double s = q[i] - q_prev[i];
        ss += s * s;
        sy += s * (g_prev[i] - g[i]);
      }
      if (sy > 0) step = std::clamp(ss / sy, 1e-10, 1e6);
    }

    std::vector<double> q_try;
    double f_try = -kInf;
    bool accepted = false;
    for (int bt = 0; bt < 80; ++bt) {
      std::vector<double> cand(n);
      for (std::size_t i = 0; i < n; ++i) cand[i] = q[i] + step * g[i];
      cand = project(std::move(cand));
      double dir_dot = 0.0, move_sq = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = cand[i] - q[i];
        dir_dot += g[i] * d;
        move_sq += d * d;
      }
      if (move_sq <= 1e-32) break;  // projection pinned us; pg decides below
      const double f_cand = objective(cand);
      if (f_cand >= f + 1e-4 * dir_dot) {
        q_try = std::move(cand);
        f_try = f_cand;
        accepted = true;
        break;
      }
      step *= 0.5;
      ++backtracks;
    }
    if (!accepted) break;

    q_prev = std::move(q);
    g_prev = std::move(g);
    q = std::move(q_try);
    f = f_try;
    g = gradient(q);
    pg = projected_gradient_norm(q, g);
  }

  if (pg > tol) {
    throw Error(ErrorCode::kNonConvergence,
                "max-prod ascent stopped after " + std::to_string(iterations) +
                    " iterations with projected gradient " + format_double(pg));
  }

  const Matrix p = exp_powers(q);
  Allocation out;
  out.values = p.data;
  out.objective_value = maxprod_objective(problem, p);
  out.diagnostics = {
      {"iterations", static_cast<double>(iterations)},
      {"pg_norm", pg},
      {"backtracks", static_cast<double>(backtracks)},
  };
  return out;
}

Allocation solve_power_uniform(const PowerProblem& problem) {
  validate_problem(problem);
  Allocation out;
  out.values.assign(problem.num_cells * problem.num_ues,
                    problem.p_max / static_cast<double>(problem.num_ues));
  out.objective_value =
      maxprod_objective(problem, as_power_matrix(problem, out.values));
  return out;
}

double maxprod_objective(const PowerProblem& problem, const Matrix& p) {
  const std::vector<double> sinr = sinr_all(problem, p);
  double f = 0.0;
  for (double s : sinr) {
    require(s > 0, "log SINR objective needs strictly positive powers");
    f += std::log(s);
  }
  return f;
}

std::vector<double> maxprod_gradient_q(const PowerProblem& problem, const Matrix& p) {
  validate_problem(problem);
  if (p.rows != problem.num_cells || p.cols != problem.num_ues) {
    throw Error(ErrorCode::kShapeMismatch, "power matrix must be L x K");
  }
  const std::size_t L = problem.num_cells, K = problem.num_ues;
  const std::vector<double> d = denominators(problem, p);
  // S_l = sum over all UEs of beta_{l->ue} / D_ue; the gradient of
  // -sum log D in p_{ln} is beta-weighted with the UE's own term removed,
  // and d f / d q = p * d f / d p.
  std::vector<double> s(L, 0.0);
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t col = 0; col < L * K; ++col) {
      s[l] += problem.cross_gain(l, col) / d[col];
    }
  }
  std::vector<double> g(L * K);
  for (std::size_t j = 0; j < L; ++j) {
    for (std::size_t k = 0; k < K; ++k) {
      const std::size_t col = j * K + k;
      g[col] = 1.0 - p(j, k) * (s[j] - problem.cross_gain(j, col) / d[col]);
    }
  }
  return g;
}

Allocation solve_waterfilling(const std::vector<double>& gains, double noise,
                              double total_power, double tol) {
  require(!gains.empty(), "water-filling needs at least one channel");
  for (double g : gains) require(std::isfinite(g) && g > 0, "gains must be > 0");
  require(std::isfinite(noise) && noise > 0, "noise must be > 0");
  require(std::isfinite(total_power) && total_power > 0, "total_power must be > 0");
  require_tol(tol);

  double mu_lo = kInf;
  for (double g : gains) mu_lo = std::min(mu_lo, noise / g);
  double mu_hi = mu_lo + total_power;

  auto total_at = [&](double mu) {
    double sum = 0.0;
    for (double g : gains) sum += std::max(0.0, mu - noise / g);
    return sum;
  };

  double mu = mu_hi;
  int iterations = 0;
  for (iterations = 1; iterations <= 200; ++iterations) {
    mu = 0.5 * (mu_lo + mu_hi);
    const double excess = total_at(mu) - total_power;
    if (std::abs(excess) <= tol) break;
    (excess > 0 ? mu_hi : mu_lo) = mu;
  }

  Allocation out;
  out.values.reserve(gains.size());
  double rate_sum = 0.0;
  for (double g : gains) {
    const double p = std::max(0.0, mu - noise / g);
    out.values.push_back(p);
    rate_sum += std::log2(1.0 + g * p / noise);
  }
  out.objective_value = rate_sum;
  out.diagnostics = {{"water_level", mu}, {"iterations", static_cast<double>(iterations)}};
  return out;
}

double jain_index(const std::vector<double>& x) {
  require(!x.empty(), "jain_index needs a non-empty vector");
  double sum = 0.0, sum_sq = 0.0;
  for (double v : x) {
    require(std::isfinite(v) && v >= 0, "jain_index needs non-negative components");
    sum += v;
    sum_sq += v * v;
  }
  if (sum_sq == 0) throw Error(ErrorCode::kAllZero, "jain_index of the zero vector");
  return sum * sum / (static_cast<double>(x.size()) * sum_sq);
}

double pf_utility(const BandwidthProblem& problem, const std::vector<double>& b) {
  validate_problem(problem);
  if (b.size() != problem.effective_snr.size()) {
    throw Error(ErrorCode::kInfeasibleInput, "allocation length must match UE count");
  }
  double total = 0.0;
  for (double v : b) {
    if (!std::isfinite(v) || v <= 0) {
      throw Error(ErrorCode::kInfeasibleInput, "every bandwidth share must be > 0");
    }
    total += v;
  }
  if (total > problem.total_bw * (1.0 + 1e-9)) {
    throw Error(ErrorCode::kInfeasibleInput, "allocation exceeds the bandwidth budget");
  }
  double u = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    u += std::log(b[k] * std::log2(1.0 + problem.effective_snr[k] / b[k]));
  }
  return u;
}

}  // namespace netorch
