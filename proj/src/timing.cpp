#include "dcf/timing.hpp"

#include "dcf/error.hpp"

#include <algorithm>
#include <limits>

namespace dcf {

void
MacTimingParams::validate() const
{
  if (!(slot_s > 0.0 && sifs_s > 0.0 && difs_s > 0.0 && eifs_s > 0.0 && prop_delay_s > 0.0
        && ack_timeout_s > 0.0))
    throw DomainError("all MAC durations must be positive");
  if (ack_bytes <= 0 || mac_header_bytes <= 0 || plcp_bits <= 0)
    throw DomainError("frame field lengths must be positive");
  if (!(basic_rate_bps > 0.0))
    throw DomainError("basic rate must be positive");
}

namespace timing {

namespace {

// Product of (1 - tau) over a set of indices, skipping `skip`.
template <typename Range>
double
silent(const Range &idx, std::span<const double> tau, std::size_t skip = std::numeric_limits<std::size_t>::max())
{
  double prod = 1.0;
  for (std::size_t j : idx)
    if (j != skip)
      prod *= 1.0 - tau[j];
  return prod;
}

// Stations in classes [lo, hi], 1-based and inclusive. Empty when lo > hi.
double
silent_classes(int lo, int hi, const ClassMap &classes, std::span<const double> tau)
{
  double prod = 1.0;
  for (int c = lo; c <= hi; ++c)
    prod *= silent(classes[static_cast<std::size_t>(c - 1)], tau);
  return prod;
}

const std::vector<std::size_t> &
members(int r, const ClassMap &classes)
{
  if (r < 1 || r > kNumRateClasses)
    throw DomainError("rate class must be in 1..4");
  return classes[static_cast<std::size_t>(r - 1)];
}

} // namespace

ClassMap
make_class_map(std::span<const StationSlotInfo> stations)
{
  ClassMap map;
  for (std::size_t s = 0; s < stations.size(); ++s)
    {
      const int r = stations[s].rate_class;
      if (r < 1 || r > kNumRateClasses)
        throw DomainError("rate class must be in 1..4");
      map[static_cast<std::size_t>(r - 1)].push_back(s);
    }
  return map;
}

double
busy_prob(std::span<const double> tau)
{
  double idle = 1.0;
  for (double t : tau)
    idle *= 1.0 - t;
  return 1.0 - idle;
}

double
success_prob(std::size_t s, std::span<const double> tau)
{
  if (s >= tau.size())
    throw DomainError("station index out of range");
  double p = tau[s];
  for (std::size_t j = 0; j < tau.size(); ++j)
    if (j != s)
      p *= 1.0 - tau[j];
  return p;
}

double
success_duration(const MacTimingParams &p, double data_rate_bps, int payload_bytes)
{
  if (!(data_rate_bps > 0.0))
    throw DomainError("data rate must be positive");
  const double header = p.plcp_bits / p.basic_rate_bps;
  const double body = 8.0 * (p.mac_header_bytes + payload_bytes) / data_rate_bps;
  const double ack = (p.plcp_bits + 8.0 * p.ack_bytes) / p.basic_rate_bps;
  return header + body + p.prop_delay_s + p.sifs_s + ack + p.prop_delay_s + p.difs_s;
}

double
collision_duration(const MacTimingParams &p, double data_rate_bps, int payload_bytes)
{
  if (!(data_rate_bps > 0.0))
    throw DomainError("data rate must be positive");
  return p.plcp_bits / p.basic_rate_bps
         + 8.0 * (p.mac_header_bytes + payload_bytes) / data_rate_bps + p.ack_timeout_s;
}

double
intra_class_collision_prob(int r, const ClassMap &classes, std::span<const double> tau)
{
  const auto &own = members(r, classes);
  double none_or_one = silent(own, tau);
  for (std::size_t s : own)
    none_or_one += tau[s] * silent(own, tau, s);
  double others = 1.0;
  for (int c = 1; c <= kNumRateClasses; ++c)
    if (c != r)
      others *= silent(classes[static_cast<std::size_t>(c - 1)], tau);
  return (1.0 - none_or_one) * others;
}

double
inter_class_collision_prob(int r, const ClassMap &classes, std::span<const double> tau)
{
  const auto &own = members(r, classes);
  const double some_own = 1.0 - silent(own, tau);
  const double some_higher = 1.0 - silent_classes(r + 1, kNumRateClasses, classes, tau);
  const double lower_silent = silent_classes(1, r - 1, classes, tau);
  return some_own * some_higher * lower_silent;
}

SlotBreakdown
slot_breakdown(std::span<const StationSlotInfo> stations, std::span<const double> tau,
               const MacTimingParams &p)
{
  if (stations.size() != tau.size())
    throw DomainError("slot_breakdown: stations and tau differ in length");
  const ClassMap classes = make_class_map(stations);

  SlotBreakdown out;
  out.p_busy = busy_prob(tau);
  out.t_idle = (1.0 - out.p_busy) * p.slot_s;

  out.p_success.resize(stations.size());
  for (std::size_t i = 0; i < stations.size(); ++i)
    {
      const auto &st = stations[i];
      const double rate = rate_class(st.rate_class).data_rate_bps;
      const double ps = success_prob(i, tau);
      out.p_success[i] = ps;
      out.t_success += ps * (1.0 - st.per) * success_duration(p, rate, st.payload_bytes);
      out.t_error += ps * st.per * collision_duration(p, rate, st.payload_bytes);
    }

  for (int r = 1; r <= kNumRateClasses; ++r)
    {
      const auto idx = static_cast<std::size_t>(r - 1);
      if (classes[idx].empty())
        continue;
      // Longest payload in the class sets the collision length.
      int payload = 0;
      for (std::size_t s : classes[idx])
        payload = std::max(payload, stations[s].payload_bytes);
      out.p_collision[idx] = intra_class_collision_prob(r, classes, tau)
                             + inter_class_collision_prob(r, classes, tau);
      out.t_collision_class[idx] = collision_duration(p, rate_class(r).data_rate_bps, payload);
      out.t_collision += out.p_collision[idx] * out.t_collision_class[idx];
    }

  out.t_av = out.t_idle + out.t_success + out.t_collision + out.t_error;
  return out;
}

} // namespace timing
} // namespace dcf
