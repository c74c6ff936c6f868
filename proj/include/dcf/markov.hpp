#pragma once

#include <vector>

namespace dcf {

/// Binary exponential backoff: W_i = 2^i W_0 for stages 0..m, and the
/// station keeps retrying in stage m (no retry limit).
struct BackoffParams
{
  int cw_min = 32;        // W_0
  int max_stage = 5;      // m

  int window(int stage) const { return cw_min << stage; }
  int cw_max() const { return window(max_stage); }

  /// Throws DomainError unless W_0 >= 1 and 0 <= m <= 20.
  void validate() const;
  bool operator==(const BackoffParams &) const = default;
};

namespace markov {

/// Stationary quantities of one station's chain.
struct StationChainState
{
  double p_eq = 0.0;
  double q = 0.0;
  double p_i0 = 0.0;
  double alpha = 0.0;
  double b00 = 0.0;
  double b_idle = 0.0;
  double tau = 0.0;
};

/// P_eq = 1 - (1 - P_col)(1 - P_e).
double equivalent_failure_prob(double p_col, double p_e);

/// Normalization factor alpha, with b_I + alpha * b_00 = 1.
/// Throws DomainError for P_eq outside [0, 1).
double alpha(const BackoffParams &bo, double p_eq);

/// tau = (1 - b_I) / (alpha (1 - P_eq)).
double tau_general(double b_idle, double alpha, double p_eq);

/// tau under the small-buffer approximation q = P_{I,0}. Finite at P_eq = 1,
/// where it tends to 2 / (W_m + 1).
double tau_small_queue(double q, const BackoffParams &bo, double p_eq);

/// q = 1 - exp(-lambda * T_av).
double queue_nonempty_prob(double lambda_pkt_s, double t_av_s);

/// Solves the chain for given q, P_{I,0} and P_eq.
StationChainState solve_chain(double q, double p_i0, const BackoffParams &bo,
                              double p_eq);

/// Every b_{i,k} rebuilt from the per-stage recursions; stage i has
/// W_i entries. Used to check normalization against alpha.
struct ChainDistribution
{
  std::vector<std::vector<double>> b;   // b[i][k]
  double b_idle = 0.0;

  double total() const;
};

ChainDistribution reconstruct_distribution(const StationChainState &st,
                                           const BackoffParams &bo);

} // namespace markov
} // namespace dcf
