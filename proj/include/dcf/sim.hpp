#pragma once

#include "dcf/scenario.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace dcf::sim {

struct SimOptions
{
  double duration_s = 100.0;
  std::uint64_t seed = 1;
  std::size_t queue_capacity = 2;     // packets, head-of-line included
  double warmup_fraction = 0.05;
  bool operator==(const SimOptions &) const = default;
};

struct StationStats
{
  std::uint64_t attempts = 0;
  std::uint64_t successes = 0;
  std::uint64_t collisions = 0;
  std::uint64_t channel_errors = 0;
  std::uint64_t arrivals = 0;
  std::uint64_t drops = 0;
  double delivered_bits = 0.0;
  double throughput_bps = 0.0;
  double tau_estimate = 0.0;    // attempts per virtual slot

  bool operator==(const StationStats &) const = default;
};

/// Counters over the measured window [warmup, duration).
struct SimReport
{
  std::vector<StationStats> stations;
  double virtual_time_s = 0.0;
  std::uint64_t slots = 0;
  double aggregate_bps = 0.0;

  bool operator==(const SimReport &) const = default;
};

/// Slot-synchronous DCF basic access.
///
/// Each virtual slot is either an idle slot of length sigma or a busy period.
/// Every station in backoff with counter 0 transmits; all other backoff
/// counters move down by one per virtual slot. A lone transmitter succeeds
/// unless a Bernoulli draw with its PER marks the frame lost (duration T_e,
/// equal to its collision duration); two or more transmitters collide for the
/// longest of their collision durations. A failed station moves up one stage,
/// capped at m, and redraws its counter from [0, W_i - 1]. After a success the
/// station restarts at stage 0 if its queue still holds a packet and goes idle
/// otherwise; an idle station that finds a packet at a slot boundary draws a
/// stage-0 counter. Arrivals are Poisson and dropped when the queue is full.
///
/// Random streams: each station owns two std::mt19937_64 engines, seeded from
/// std::seed_seq{seed_low32, seed_high32, station, stream} with stream 0 for
/// arrivals and stream 1 for backoff and channel-error draws.
SimReport run(const NetworkParams &net, std::span<const ResolvedStation> stations,
              const SimOptions &opts);

SimReport run(const Scenario &scn, const SimOptions &opts);

struct BatchReport
{
  std::vector<SimReport> runs;   // in seed order
  double mean_aggregate_bps = 0.0;
  double stddev_aggregate_bps = 0.0;
  std::vector<double> mean_station_bps;
  std::vector<double> stddev_station_bps;
};

/// Independent replications, one per seed; runs execute concurrently and are
/// merged in seed order.
BatchReport batch(const NetworkParams &net, std::span<const ResolvedStation> stations,
                  const SimOptions &base, std::span<const std::uint64_t> seeds);

BatchReport batch(const Scenario &scn, const SimOptions &base,
                  std::span<const std::uint64_t> seeds);

} // namespace dcf::sim
