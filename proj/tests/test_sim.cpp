#include "dcf/error.hpp"
#include "dcf/markov.hpp"
#include "dcf/scenario_file.hpp"
#include "dcf/sim.hpp"

#include <doctest.h>

#include <cmath>

using namespace dcf;

namespace {

Scenario
uniform(int n, int cls, double lambda, double per = 0.0)
{
  Scenario s;
  StationConfig st;
  st.rate_class = cls;
  st.lambda_pkt_s = lambda;
  if (per > 0.0)
    st.channel = FixedPer{per};
  s.stations.assign(n, st);
  return s;
}

sim::SimOptions
opts(double duration, std::uint64_t seed = 1)
{
  sim::SimOptions o;
  o.duration_s = duration;
  o.seed = seed;
  return o;
}

} // namespace

TEST_CASE("silent station")
{
  const auto rep = sim::run(uniform(1, 4, 0.0), opts(10.0));
  CHECK(rep.aggregate_bps == 0.0);
  CHECK(rep.stations[0].attempts == 0);
  CHECK(rep.slots > 0);
}

TEST_CASE("zero duration gives an empty report")
{
  const auto rep = sim::run(uniform(3, 4, kSaturated), opts(0.0));
  CHECK(rep.stations.size() == 3);
  CHECK(rep.slots == 0);
  CHECK(rep.aggregate_bps == 0.0);
}

TEST_CASE("one saturated station matches the renewal cycle")
{
  const auto rep = sim::run(uniform(1, 4, kSaturated), opts(100.0));
  const auto &st = rep.stations[0];
  const double tau = 2.0 / 33.0;
  const double se = std::sqrt(tau * (1.0 - tau) / double(rep.slots));
  CHECK(std::abs(st.tau_estimate - tau) < 3.0 * se);
  // mean backoff (W0 - 1)/2 idle slots, then the exchange
  const double cycle = 15.5 * 20e-6 + 1326e-6;
  CHECK(st.throughput_bps == doctest::Approx(8.0 * 1028 / cycle).epsilon(0.02));
  CHECK(st.collisions == 0);
}

TEST_CASE("one lossy station matches the chain")
{
  const double per = 0.3;
  const auto rep = sim::run(uniform(1, 2, kSaturated, per), opts(200.0, 4));
  const auto &st = rep.stations[0];
  const double tau = markov::tau_small_queue(1.0, BackoffParams{}, per);
  const double se = std::sqrt(tau * (1.0 - tau) / double(rep.slots));
  CHECK(std::abs(st.tau_estimate - tau) < 3.0 * se);
  CHECK(double(st.channel_errors) / double(st.attempts) == doctest::Approx(per).epsilon(0.03));
}

TEST_CASE("counters are consistent")
{
  Scenario s = uniform(5, 3, 150.0, 0.05);
  s.stations[0].rate_class = 1;
  s.stations[4].lambda_pkt_s = kSaturated;
  const auto rep = sim::run(s, opts(30.0, 9));
  double agg = 0.0;
  for (const auto &st : rep.stations)
    {
      CHECK(st.attempts == st.successes + st.collisions + st.channel_errors);
      CHECK(st.delivered_bits == doctest::Approx(double(st.successes) * 8 * 1028));
      CHECK(st.throughput_bps == doctest::Approx(st.delivered_bits / rep.virtual_time_s));
      agg += st.throughput_bps;
    }
  CHECK(rep.aggregate_bps == doctest::Approx(agg));
  CHECK(rep.virtual_time_s == doctest::Approx(30.0 * 0.95));
  // 150 pkt/s with the slow station in the cell is beyond capacity
  CHECK(rep.stations[1].drops > 0);
}

TEST_CASE("light load delivers the offered load")
{
  const auto rep = sim::run(uniform(5, 4, 20.0), opts(1000.0, 2));
  for (const auto &st : rep.stations)
    CHECK(st.throughput_bps == doctest::Approx(20.0 * 8 * 1028).epsilon(0.03));
}

TEST_CASE("determinism")
{
  const auto file = io::preset("scenario2");
  const auto a = sim::run(file.scenario, opts(20.0, 17));
  const auto b = sim::run(file.scenario, opts(20.0, 17));
  CHECK(a == b);
  const auto c = sim::run(file.scenario, opts(20.0, 18));
  CHECK_FALSE(a == c);
}

TEST_CASE("batch merges runs in seed order")
{
  const Scenario s = uniform(3, 4, 100.0);
  const std::vector<std::uint64_t> seeds{5, 3, 8};
  const auto rep = sim::batch(s, opts(5.0), seeds);
  REQUIRE(rep.runs.size() == 3);
  double mean = 0.0;
  for (std::size_t i = 0; i < seeds.size(); ++i)
    {
      CHECK(rep.runs[i] == sim::run(s, opts(5.0, seeds[i])));
      mean += rep.runs[i].aggregate_bps / 3.0;
    }
  CHECK(rep.mean_aggregate_bps == doctest::Approx(mean));
  CHECK(rep.stddev_aggregate_bps > 0.0);
  CHECK(rep.mean_station_bps.size() == 3);
}

TEST_CASE("a slow station drags the cell down")
{
  auto file = io::preset("scenario1");
  file.scenario.stations.back().lambda_pkt_s = kSaturated;
  file.scenario.stations.back().rate_class = 4;
  const double fast = sim::run(file.scenario, opts(20.0)).aggregate_bps;
  file.scenario.stations.back().rate_class = 1;
  const double slow = sim::run(file.scenario, opts(20.0)).aggregate_bps;
  CHECK(slow < fast);
}

TEST_CASE("invalid options")
{
  sim::SimOptions o = opts(1.0);
  o.queue_capacity = 0;
  CHECK_THROWS_AS(sim::run(uniform(1, 4, 1.0), o), DomainError);
  o = opts(1.0);
  o.warmup_fraction = 1.0;
  CHECK_THROWS_AS(sim::run(uniform(1, 4, 1.0), o), DomainError);
}
