#include "dcf/solver.hpp"

#include "dcf/error.hpp"
#include "dcf/markov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dcf::solver {

namespace {

struct Iterate
{
  std::vector<double> tau;
  std::vector<double> p_col;
  std::vector<double> q;
  double t_av = 0.0;
};

double
others_collide(std::size_t s, std::span<const double> tau)
{
  double silent = 1.0;
  for (std::size_t j = 0; j < tau.size(); ++j)
    if (j != s)
      silent *= 1.0 - tau[j];
  return 1.0 - silent;
}

// One undamped application of the equation chain.
Iterate
apply_map(const Iterate &x, const NetworkParams &net, std::span<const ResolvedStation> stations,
          std::span<const timing::StationSlotInfo> info)
{
  const std::size_t n = stations.size();
  Iterate y;
  y.tau.resize(n);
  y.p_col.resize(n);
  y.q.resize(n);
  for (std::size_t s = 0; s < n; ++s)
    {
      y.p_col[s] = others_collide(s, x.tau);
      y.q[s] = stations[s].saturated()
                   ? 1.0
                   : markov::queue_nonempty_prob(stations[s].lambda_pkt_s, x.t_av);
      const double p_eq = markov::equivalent_failure_prob(x.p_col[s], stations[s].per);
      y.tau[s] = markov::tau_small_queue(x.q[s], net.backoff, p_eq);
    }
  y.t_av = timing::slot_breakdown(info, x.tau, net.mac).t_av;
  return y;
}

double
distance(const Iterate &a, const Iterate &b)
{
  double d = std::abs(a.t_av - b.t_av) / std::max(a.t_av, b.t_av);
  for (std::size_t s = 0; s < a.tau.size(); ++s)
    {
      d = std::max(d, std::abs(a.tau[s] - b.tau[s]));
      d = std::max(d, std::abs(a.p_col[s] - b.p_col[s]));
      d = std::max(d, std::abs(a.q[s] - b.q[s]));
    }
  return d;
}

bool
finite(const Iterate &x)
{
  if (!std::isfinite(x.t_av) || !(x.t_av > 0.0))
    return false;
  for (std::size_t s = 0; s < x.tau.size(); ++s)
    if (!(x.tau[s] >= 0.0 && x.tau[s] <= 1.0) || !(x.p_col[s] >= 0.0 && x.p_col[s] <= 1.0)
        || !(x.q[s] >= 0.0 && x.q[s] <= 1.0))
      return false;
  return true;
}

void
blend(Iterate &x, const Iterate &y, double beta)
{
  auto mix = [beta](double a, double b) { return (1.0 - beta) * a + beta * b; };
  for (std::size_t s = 0; s < x.tau.size(); ++s)
    {
      x.tau[s] = mix(x.tau[s], y.tau[s]);
      x.p_col[s] = mix(x.p_col[s], y.p_col[s]);
      x.q[s] = mix(x.q[s], y.q[s]);
    }
  x.t_av = mix(x.t_av, y.t_av);
}

OperatingPoint
finish(const Iterate &x, const NetworkParams &net, std::span<const ResolvedStation> stations,
       std::span<const timing::StationSlotInfo> info, double residual, int iterations)
{
  OperatingPoint op;
  op.tau = x.tau;
  op.p_col = x.p_col;
  op.q = x.q;
  op.t_av = x.t_av;
  op.p_eq.resize(stations.size());
  for (std::size_t s = 0; s < stations.size(); ++s)
    op.p_eq[s] = markov::equivalent_failure_prob(x.p_col[s], stations[s].per);
  op.breakdown = timing::slot_breakdown(info, x.tau, net.mac);
  op.residual = residual;
  op.iterations = iterations;
  return op;
}

Iterate
to_iterate(const OperatingPoint &op)
{
  return {op.tau, op.p_col, op.q, op.t_av};
}

} // namespace

OperatingPoint
solve_operating_point(const NetworkParams &net, std::span<const ResolvedStation> stations,
                      const SolverOptions &opts)
{
  net.validate();
  if (stations.empty())
    throw DomainError("no stations to solve for");
  if (!(opts.damping > 0.0 && opts.damping <= 1.0))
    throw DomainError("damping must lie in (0, 1]");
  if (!(opts.tol > 0.0) || opts.max_iters < 1)
    throw DomainError("tolerance and iteration limit must be positive");

  const auto info = slot_infos(stations);
  const std::size_t n = stations.size();

  Iterate x;
  x.tau.assign(n, 2.0 / (net.backoff.cw_min + 1.0));
  x.p_col.resize(n);
  x.q.resize(n);
  x.t_av = net.mac.slot_s;
  for (std::size_t s = 0; s < n; ++s)
    {
      x.p_col[s] = others_collide(s, x.tau);
      x.q[s] = stations[s].saturated()
                   ? 1.0
                   : markov::queue_nonempty_prob(stations[s].lambda_pkt_s, x.t_av);
    }

  constexpr double kGrowth = 1.1;
  double beta = opts.damping;
  int halvings = 0;
  double last = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= opts.max_iters; ++it)
    {
      const Iterate y = apply_map(x, net, stations, info);
      if (!finite(y))
        throw NumericalError("fixed-point map left the valid range at iteration "
                             + std::to_string(it));
      const double residual = distance(x, y);
      if (residual <= opts.tol)
        return finish(x, net, stations, info, residual, it);
      // small rises along a slow plateau are not oscillation; halving on those
      // strands beta at 1/32
      if (residual > kGrowth * last && halvings < 4)
        {
          beta *= 0.5;
          ++halvings;
        }
      last = residual;
      blend(x, y, beta);
    }
  const double residual = distance(x, apply_map(x, net, stations, info));
  throw DivergenceError("fixed point not reached after " + std::to_string(opts.max_iters)
                            + " iterations",
                        residual);
}

OperatingPoint
solve_operating_point(const Scenario &scn, const SolverOptions &opts)
{
  const auto stations = resolve(scn);
  return solve_operating_point(scn.net, stations, opts);
}

double
fixed_point_residual(const NetworkParams &net, std::span<const ResolvedStation> stations,
                     const OperatingPoint &op)
{
  const auto info = slot_infos(stations);
  const Iterate x = to_iterate(op);
  return distance(x, apply_map(x, net, stations, info));
}

double
linear_model(std::span<const ResolvedStation> stations)
{
  double s = 0.0;
  for (const auto &st : stations)
    s += 8.0 * st.payload_bytes * st.lambda_pkt_s;
  return s;
}

double
critical_rate(const RateClassSpec &spec, const MacTimingParams &mac, const BackoffParams &bo,
              int payload_bytes)
{
  const double access = 0.5 * bo.cw_min * mac.slot_s;
  return 1.0 / (access + timing::success_duration(mac, spec.data_rate_bps, payload_bytes));
}

bool
in_region(std::span<const double> lambda, std::span<const double> lambda_c)
{
  if (lambda.size() != lambda_c.size() || lambda.empty())
    throw DomainError("in_region: vector sizes differ");
  double load = 0.0;
  for (std::size_t s = 0; s < lambda.size(); ++s)
    {
      if (!(lambda[s] >= 0.0) || std::isinf(lambda[s]))
        return false;
      if (s + 1 < lambda.size() && !(lambda[s] < 0.5 * lambda_c[s]))
        return false;
      load += lambda[s] / lambda_c[s];
    }
  return load <= 0.5;
}

ThroughputReport
aggregate_throughput(const OperatingPoint &op, const NetworkParams &net,
                     std::span<const ResolvedStation> stations)
{
  ThroughputReport rep;
  rep.per_station_bps.resize(stations.size());
  std::vector<double> lambda(stations.size());
  std::vector<double> lambda_c(stations.size());
  for (std::size_t s = 0; s < stations.size(); ++s)
    {
      const auto &st = stations[s];
      const double bits = 8.0 * st.payload_bytes;
      rep.per_station_bps[s] = op.breakdown.p_success[s] * (1.0 - st.per) * bits / op.t_av;
      rep.aggregate_bps += rep.per_station_bps[s];
      lambda[s] = st.lambda_pkt_s;
      lambda_c[s] = critical_rate(rate_class(st.rate_class), net.mac, net.backoff,
                                  st.payload_bytes);
    }
  rep.linear_bps = linear_model(stations);
  rep.in_region = in_region(lambda, lambda_c);
  return rep;
}

std::vector<SweepPoint>
sweep(const Scenario &scn, const SweepAxis &axis, std::span<const double> grid,
      const SolverOptions &opts)
{
  if (axis.kind != SweepAxis::Kind::common_rate && axis.station >= scn.stations.size())
    throw DomainError("sweep axis names a station that does not exist");
  std::vector<SweepPoint> out;
  out.reserve(grid.size());
  for (double x : grid)
    {
      Scenario point = scn;
      switch (axis.kind)
        {
        case SweepAxis::Kind::common_rate:
          for (auto &st : point.stations)
            st.lambda_pkt_s = x;
          break;
        case SweepAxis::Kind::station_rate:
          point.stations[axis.station].lambda_pkt_s = x;
          break;
        case SweepAxis::Kind::distance:
          point.stations[axis.station].channel = AtDistance{x};
          break;
        }
      SweepPoint sp;
      sp.x = x;
      sp.stations = resolve(point);
      sp.op = solve_operating_point(point.net, sp.stations, opts);
      sp.report = aggregate_throughput(sp.op, point.net, sp.stations);
      out.push_back(std::move(sp));
    }
  return out;
}

} // namespace dcf::solver
