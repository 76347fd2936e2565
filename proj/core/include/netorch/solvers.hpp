#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "netorch/canonical.hpp"

namespace netorch {

// Bandwidth case: split total_bw across K UEs whose rate at bandwidth b is
// R_k(b) = b * log2(1 + c_k / b), c_k the effective SNR (per-UE transmit
// power over noise density, in bandwidth units).
struct BandwidthProblem {
  double total_bw = 0.0;
  std::vector<double> effective_snr;  // c_k > 0, one per UE
};

// Power case: L cells, K UEs per cell, per-BS budget p_max.
//   signal_gain(j, k)      a_jk: coherent beamforming gain of UE (j,k),
//                          includes the antenna count.
//   cross_gain(l, j*K+k)   beta_{l->(j,k)}: large-scale gain from BS l to
//                          UE (j,k); interference is non-coherent and does
//                          not depend on which UE BS l is serving.
// SINR_jk(p) = a_jk p_jk / (sum_{(l,i) != (j,k)} beta_{l->(j,k)} p_li + noise).
struct PowerProblem {
  std::size_t num_cells = 0;  // L
  std::size_t num_ues = 0;    // K per cell
  Matrix signal_gain;         // L x K
  Matrix cross_gain;          // L x (L*K)
  double noise = 1.0;         // sigma^2
  double p_max = 0.0;
};

struct Allocation {
  std::vector<double> values;  // bandwidth per UE, or powers row-major (L*K)
  double objective_value = 0.0;
  std::map<std::string, double> diagnostics;
};

// Raise InvalidProblem when invariants fail; solvers call these themselves.
void validate_problem(const BandwidthProblem& problem);
void validate_problem(const PowerProblem& problem);

// Per-UE SINR, row-major over (cell, ue). Raises ShapeMismatch when p is
// not L x K, InvalidProblem on negative powers.
std::vector<double> sinr_all(const PowerProblem& problem, const Matrix& p);
Matrix as_power_matrix(const PowerProblem& problem, const std::vector<double>& values);

// Marginal utility dU_k/db at bandwidth b for effective SNR c:
// (1/b) * (1 - x / ((1+x) ln(1+x))), x = c/b. Strictly positive and
// strictly decreasing in b. Exposed so tests can check it against finite
// differences of ln(b log2(1 + c/b)).
double pf_marginal_utility(double c, double b);

// Proportional-fair bandwidth split: maximizes sum_k ln R_k subject to
// sum b_k = total_bw via nested bisection (outer on the shared marginal
// lambda, inner on each b_k). tol bounds the relative spread of the
// marginal utilities at the returned point.
Allocation solve_bandwidth_pf(const BandwidthProblem& problem, double tol = 1e-9);

// Baseline: b_k = B/K exactly.
Allocation solve_bandwidth_equal(const BandwidthProblem& problem);

// Max-min SINR power control: bisection on the common target t; each
// feasibility probe runs the standard-interference fixed point
// p <- t (I(p) + noise) / a from p = 0, feasible iff it converges with
// every per-BS budget met. Returns the powers of the last feasible probe;
// objective_value and diagnostics["target"] are the achieved min SINR.
Allocation solve_power_maxmin(const PowerProblem& problem, double tol = 1e-8);

// Max product of SINRs: ascent on f(q) = sum log SINR(e^q), concave in
// q = log p, with Armijo backtracking, a Barzilai-Borwein step estimate,
// and per-BS Euclidean projection in q-space (dual bisection). Converged
// when the tangent-cone-projected gradient norm is <= tol.
Allocation solve_power_maxprod(const PowerProblem& problem, double tol = 1e-6);

// Baseline: p_jk = p_max / K for every UE.
Allocation solve_power_uniform(const PowerProblem& problem);

// f(q) = sum_jk ln SINR_jk(exp(q)) and its gradient in q, evaluated at the
// power matrix p = exp(q). Exposed for the finite-difference checks.
double maxprod_objective(const PowerProblem& problem, const Matrix& p);
std::vector<double> maxprod_gradient_q(const PowerProblem& problem, const Matrix& p);

// Classic water-filling over parallel channels: p_k = max(0, mu - noise/g_k)
// with the water level mu found by bisection so sum p_k = total_power
// within tol. objective_value is sum_k log2(1 + g_k p_k / noise).
Allocation solve_waterfilling(const std::vector<double>& gains, double noise,
                              double total_power, double tol = 1e-12);

// (sum x)^2 / (n sum x^2) in [1/n, 1]. Raises AllZero on the zero vector.
double jain_index(const std::vector<double>& x);

// sum_k ln(b_k log2(1 + c_k/b_k)); raises InfeasibleInput unless every
// b_k > 0 and sum b_k <= total_bw (small slack for rounding).
double pf_utility(const BandwidthProblem& problem, const std::vector<double>& b);

}  // namespace netorch
