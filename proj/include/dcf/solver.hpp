#pragma once

#include "dcf/scenario.hpp"
#include "dcf/timing.hpp"

#include <span>
#include <vector>

namespace dcf::solver {

struct SolverOptions
{
  double tol = 1e-12;
  int max_iters = 10000;
  double damping = 0.5;
  bool operator==(const SolverOptions &) const = default;
};

/// Converged per-station operating point.
struct OperatingPoint
{
  std::vector<double> tau;
  std::vector<double> p_col;
  std::vector<double> p_eq;
  std::vector<double> q;
  double t_av = 0.0;
  timing::SlotBreakdown breakdown;
  double residual = 0.0;
  int iterations = 0;
};

struct ThroughputReport
{
  double aggregate_bps = 0.0;
  std::vector<double> per_station_bps;
  double linear_bps = 0.0;
  bool in_region = false;
};

/// Damped successive substitution over (tau, P_col, q, T_av).
///
/// Each sweep maps the current iterate through P_col = 1 - prod_{j != s}(1 -
/// tau_j), P_eq = 1 - (1 - P_col)(1 - P_e), q = 1 - exp(-lambda T_av) (q = 1
/// when saturated), tau from the small-queue chain, and T_av from the slot
/// breakdown, then blends the result with weight `damping`. The weight is
/// halved (at most four times) whenever the step size grows. Convergence is
/// declared when both the step and the residual of the undamped map are below
/// `tol` in the sup norm (T_av measured relative to itself).
///
/// Throws DivergenceError after max_iters, NumericalError on NaN.
OperatingPoint solve_operating_point(const NetworkParams &net,
                                     std::span<const ResolvedStation> stations,
                                     const SolverOptions &opts = {});

OperatingPoint solve_operating_point(const Scenario &scn, const SolverOptions &opts = {});

/// Sup-norm change of one undamped sweep applied at `op`.
double fixed_point_residual(const NetworkParams &net, std::span<const ResolvedStation> stations,
                            const OperatingPoint &op);

/// S = sum_s P_s (1 - P_e) PL_s / T_av, plus the linear prediction and the
/// region test.
ThroughputReport aggregate_throughput(const OperatingPoint &op, const NetworkParams &net,
                                      std::span<const ResolvedStation> stations);

/// sum_s 8 PL_s lambda_s in bit/s; infinite if any station is saturated.
double linear_model(std::span<const ResolvedStation> stations);

/// 1 / (W_0 sigma / 2 + T_s) for one rate class and payload.
double critical_rate(const RateClassSpec &spec, const MacTimingParams &mac,
                     const BackoffParams &bo, int payload_bytes);

/// lambda_s in [0, lambda_c_s / 2) for every station but the last, and
/// sum_s lambda_s / lambda_c_s <= 1/2.
bool in_region(std::span<const double> lambda, std::span<const double> lambda_c);

/// What a sweep varies.
struct SweepAxis
{
  enum class Kind { station_rate, common_rate, distance };
  Kind kind = Kind::common_rate;
  std::size_t station = 0;   // for station_rate and distance
};

struct SweepPoint
{
  double x = 0.0;
  std::vector<ResolvedStation> stations;
  OperatingPoint op;
  ThroughputReport report;
};

/// One solve per grid value, returned in grid order. For the distance axis
/// the station is moved to x metres and, if its class is automatic, re-rated.
std::vector<SweepPoint> sweep(const Scenario &scn, const SweepAxis &axis,
                              std::span<const double> grid, const SolverOptions &opts = {});

} // namespace dcf::solver
