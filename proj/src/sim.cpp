#include "dcf/sim.hpp"

#include "dcf/error.hpp"
#include "dcf/timing.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>

namespace dcf::sim {

namespace {

constexpr double kNever = std::numeric_limits<double>::infinity();

enum class Mode { idle, backoff };

struct Station
{
  ResolvedStation cfg;
  double t_success = 0.0;
  double t_fail = 0.0;          // collision or channel-error duration

  std::mt19937_64 arrivals_rng;
  std::mt19937_64 mac_rng;

  Mode mode = Mode::idle;
  int stage = 0;
  long counter = 0;
  std::size_t queued = 0;
  double next_arrival = kNever;

  StationStats stats;
};

std::mt19937_64
make_stream(std::uint64_t seed, std::size_t station, std::uint32_t stream)
{
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(station), stream};
  return std::mt19937_64(seq);
}

class Engine
{
public:
  Engine(const NetworkParams &net, std::span<const ResolvedStation> stations,
         const SimOptions &opts)
    : m_net(net), m_opts(opts)
  {
    m_stations.reserve(stations.size());
    for (std::size_t s = 0; s < stations.size(); ++s)
      {
        Station st;
        st.cfg = stations[s];
        const double rate = rate_class(st.cfg.rate_class).data_rate_bps;
        st.t_success = timing::success_duration(net.mac, rate, st.cfg.payload_bytes);
        st.t_fail = timing::collision_duration(net.mac, rate, st.cfg.payload_bytes);
        st.arrivals_rng = make_stream(opts.seed, s, 0);
        st.mac_rng = make_stream(opts.seed, s, 1);
        if (st.cfg.saturated())
          st.queued = opts.queue_capacity;
        else if (st.cfg.lambda_pkt_s > 0.0)
          st.next_arrival = draw_interarrival(st);
        m_stations.push_back(std::move(st));
      }
    m_measure_from = opts.warmup_fraction * opts.duration_s;
  }

  SimReport run()
  {
    const double sigma = m_net.mac.slot_s;
    double t = 0.0;
    std::vector<std::size_t> tx;
    while (t < m_opts.duration_s)
      {
        for (auto &st : m_stations)
          if (st.mode == Mode::idle)
            {
              take_arrivals(st, t);
              if (st.queued > 0)
                start_backoff(st, 0);
            }

        tx.clear();
        for (std::size_t s = 0; s < m_stations.size(); ++s)
          if (m_stations[s].mode == Mode::backoff && m_stations[s].counter == 0)
            tx.push_back(s);

        if (tx.empty())
          {
            // Jump over the run of idle slots up to the next slot boundary
            // where a counter expires or an idle station sees an arrival.
            double jump = kNever;
            for (const auto &st : m_stations)
              {
                if (st.mode == Mode::backoff)
                  jump = std::min(jump, double(st.counter));
                else if (st.next_arrival < kNever)
                  jump = std::min(jump, std::max(1.0, std::ceil((st.next_arrival - t) / sigma)));
              }
            jump = std::min(jump, std::max(1.0, std::ceil((m_opts.duration_s - t) / sigma)));
            const auto n = static_cast<long>(jump);
            count_idle_slots(t, n);
            for (auto &st : m_stations)
              if (st.mode == Mode::backoff)
                st.counter -= n;
            t += double(n) * sigma;
            continue;
          }

        const bool measured = t >= m_measure_from;
        if (measured)
          ++m_slots;
        for (auto &st : m_stations)
          if (st.mode == Mode::backoff && st.counter > 0)
            --st.counter;

        if (tx.size() == 1)
          {
            Station &st = m_stations[tx.front()];
            std::bernoulli_distribution lost(std::clamp(st.cfg.per, 0.0, 1.0));
            const bool error = lost(st.mac_rng);
            if (measured)
              ++st.stats.attempts;
            if (error)
              {
                t += st.t_fail;
                if (measured)
                  ++st.stats.channel_errors;
                fail(st);
              }
            else
              {
                t += st.t_success;
                if (measured)
                  {
                    ++st.stats.successes;
                    st.stats.delivered_bits += 8.0 * st.cfg.payload_bytes;
                  }
                succeed(st, t);
              }
          }
        else
          {
            double busy = 0.0;
            for (std::size_t s : tx)
              busy = std::max(busy, m_stations[s].t_fail);
            t += busy;
            for (std::size_t s : tx)
              {
                Station &st = m_stations[s];
                if (measured)
                  {
                    ++st.stats.attempts;
                    ++st.stats.collisions;
                  }
                fail(st);
              }
          }
      }
    return report();
  }

private:
  double draw_interarrival(Station &st)
  {
    std::exponential_distribution<double> gap(st.cfg.lambda_pkt_s);
    return gap(st.arrivals_rng);
  }

  void take_arrivals(Station &st, double now)
  {
    if (st.cfg.saturated())
      return;
    while (st.next_arrival <= now)
      {
        const bool measured = st.next_arrival >= m_measure_from;
        if (measured)
          ++st.stats.arrivals;
        if (st.queued < m_opts.queue_capacity)
          ++st.queued;
        else if (measured)
          ++st.stats.drops;
        st.next_arrival += draw_interarrival(st);
      }
  }

  void start_backoff(Station &st, int stage)
  {
    st.mode = Mode::backoff;
    st.stage = stage;
    std::uniform_int_distribution<long> pick(0, m_net.backoff.window(stage) - 1);
    st.counter = pick(st.mac_rng);
  }

  void fail(Station &st)
  {
    start_backoff(st, std::min(st.stage + 1, m_net.backoff.max_stage));
  }

  void succeed(Station &st, double now)
  {
    take_arrivals(st, now);
    if (!st.cfg.saturated())
      --st.queued;
    if (st.queued > 0)
      start_backoff(st, 0);
    else
      st.mode = Mode::idle;
  }

  void count_idle_slots(double t, long n)
  {
    if (t >= m_measure_from)
      {
        m_slots += static_cast<std::uint64_t>(n);
        return;
      }
    const double skipped = std::ceil((m_measure_from - t) / m_net.mac.slot_s);
    if (double(n) > skipped)
      m_slots += static_cast<std::uint64_t>(double(n) - skipped);
  }

  SimReport report() const
  {
    SimReport rep;
    rep.virtual_time_s = m_opts.duration_s - m_measure_from;
    rep.slots = m_slots;
    for (const auto &st : m_stations)
      {
        StationStats s = st.stats;
        s.throughput_bps = s.delivered_bits / rep.virtual_time_s;
        s.tau_estimate = m_slots > 0 ? double(s.attempts) / double(m_slots) : 0.0;
        rep.aggregate_bps += s.throughput_bps;
        rep.stations.push_back(s);
      }
    return rep;
  }

  const NetworkParams &m_net;
  SimOptions m_opts;
  std::vector<Station> m_stations;
  double m_measure_from = 0.0;
  std::uint64_t m_slots = 0;
};

} // namespace

SimReport
run(const NetworkParams &net, std::span<const ResolvedStation> stations, const SimOptions &opts)
{
  net.validate();
  if (opts.queue_capacity < 1)
    throw DomainError("queue capacity must be at least 1");
  if (!(opts.warmup_fraction >= 0.0 && opts.warmup_fraction < 1.0))
    throw DomainError("warm-up fraction must lie in [0, 1)");
  if (!(opts.duration_s > 0.0))
    {
      SimReport empty;
      empty.stations.resize(stations.size());
      return empty;
    }
  return Engine(net, stations, opts).run();
}

SimReport
run(const Scenario &scn, const SimOptions &opts)
{
  const auto stations = resolve(scn);
  return run(scn.net, stations, opts);
}

BatchReport
batch(const NetworkParams &net, std::span<const ResolvedStation> stations,
      const SimOptions &base, std::span<const std::uint64_t> seeds)
{
  std::vector<std::future<SimReport>> pending;
  pending.reserve(seeds.size());
  for (std::uint64_t seed : seeds)
    {
      SimOptions opts = base;
      opts.seed = seed;
      pending.push_back(std::async(std::launch::async, [&net, stations, opts] {
        return run(net, stations, opts);
      }));
    }

  BatchReport out;
  for (auto &f : pending)
    out.runs.push_back(f.get());
  if (out.runs.empty())
    return out;

  const std::size_t n = stations.size();
  const double k = double(out.runs.size());
  out.mean_station_bps.assign(n, 0.0);
  out.stddev_station_bps.assign(n, 0.0);
  for (const auto &r : out.runs)
    {
      out.mean_aggregate_bps += r.aggregate_bps / k;
      for (std::size_t s = 0; s < n; ++s)
        out.mean_station_bps[s] += r.stations[s].throughput_bps / k;
    }
  if (out.runs.size() > 1)
    {
      double agg = 0.0;
      std::vector<double> per(n, 0.0);
      for (const auto &r : out.runs)
        {
          agg += std::pow(r.aggregate_bps - out.mean_aggregate_bps, 2);
          for (std::size_t s = 0; s < n; ++s)
            per[s] += std::pow(r.stations[s].throughput_bps - out.mean_station_bps[s], 2);
        }
      out.stddev_aggregate_bps = std::sqrt(agg / (k - 1.0));
      for (std::size_t s = 0; s < n; ++s)
        out.stddev_station_bps[s] = std::sqrt(per[s] / (k - 1.0));
    }
  return out;
}

BatchReport
batch(const Scenario &scn, const SimOptions &base, std::span<const std::uint64_t> seeds)
{
  const auto stations = resolve(scn);
  return batch(scn.net, stations, base, seeds);
}

} // namespace dcf::sim
