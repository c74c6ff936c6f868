#include "dcf/error.hpp"
#include "dcf/timing.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

using namespace dcf;

namespace {

struct Enumerated
{
  double idle = 0.0;
  std::vector<double> success;
  std::array<double, kNumRateClasses> intra{};
  std::array<double, kNumRateClasses> inter{};
  double t_av = 0.0;
};

// Walks all 2^N transmit patterns.
Enumerated
enumerate(const std::vector<timing::StationSlotInfo> &st, const std::vector<double> &tau,
          const MacTimingParams &mac)
{
  const std::size_t n = st.size();
  Enumerated e;
  e.success.assign(n, 0.0);
  for (unsigned mask = 0; mask < (1u << n); ++mask)
    {
      double prob = 1.0;
      int count = 0;
      int lowest = kNumRateClasses + 1;
      int highest = 0;
      double longest = 0.0;
      std::size_t who = 0;
      for (std::size_t s = 0; s < n; ++s)
        {
          const bool on = mask & (1u << s);
          prob *= on ? tau[s] : 1.0 - tau[s];
          if (on)
            {
              ++count;
              who = s;
              lowest = std::min(lowest, st[s].rate_class);
              highest = std::max(highest, st[s].rate_class);
              longest = std::max(longest, timing::collision_duration(
                                              mac, rate_class(st[s].rate_class).data_rate_bps,
                                              st[s].payload_bytes));
            }
        }
      if (count == 0)
        {
          e.idle += prob;
          e.t_av += prob * mac.slot_s;
        }
      else if (count == 1)
        {
          e.success[who] += prob;
          const double rate = rate_class(st[who].rate_class).data_rate_bps;
          e.t_av += prob
                    * ((1.0 - st[who].per)
                           * timing::success_duration(mac, rate, st[who].payload_bytes)
                       + st[who].per * timing::collision_duration(mac, rate, st[who].payload_bytes));
        }
      else
        {
          (lowest == highest ? e.intra : e.inter)[lowest - 1] += prob;
          e.t_av += prob * longest;
        }
    }
  return e;
}

} // namespace

TEST_CASE("frame durations")
{
  MacTimingParams mac;
  CHECK(timing::success_duration(mac, 1e6, 1028) == doctest::Approx(9006e-6).epsilon(1e-12));
  CHECK(timing::success_duration(mac, 11e6, 1028) == doctest::Approx(1326e-6).epsilon(1e-12));
  CHECK(timing::collision_duration(mac, 11e6, 1028)
        == doctest::Approx(192e-6 + 8448.0 / 11e6 + 364e-6).epsilon(1e-12));
  CHECK(timing::collision_duration(mac, 1e6, 0) == doctest::Approx((192.0 + 224.0 + 364.0) * 1e-6));
  CHECK_THROWS_AS(timing::success_duration(mac, 0.0, 100), DomainError);
  mac.slot_s = 0.0;
  CHECK_THROWS_AS(mac.validate(), DomainError);
}

TEST_CASE("busy and success probabilities")
{
  const std::vector<double> tau{0.1, 0.2, 0.3};
  CHECK(timing::busy_prob(tau) == doctest::Approx(1.0 - 0.9 * 0.8 * 0.7));
  CHECK(timing::success_prob(1, tau) == doctest::Approx(0.2 * 0.9 * 0.7));
  CHECK(timing::busy_prob(std::vector<double>{}) == 0.0);
  CHECK_THROWS_AS(timing::success_prob(3, tau), DomainError);
}

TEST_CASE("collision terms against exhaustive enumeration")
{
  MacTimingParams mac;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> cls(1, 4);
  std::uniform_int_distribution<int> size(1, 10);
  for (int trial = 0; trial < 200; ++trial)
    {
      const int n = size(rng);
      std::vector<timing::StationSlotInfo> st(n);
      std::vector<double> tau(n);
      for (int s = 0; s < n; ++s)
        {
          st[s] = {cls(rng), 1028, 0.1 * u(rng)};
          tau[s] = trial % 4 == 0 ? u(rng) : 0.2 * u(rng);
        }
      const auto e = enumerate(st, tau, mac);
      const auto classes = timing::make_class_map(st);
      const auto b = timing::slot_breakdown(st, tau, mac);
      CHECK(1.0 - b.p_busy == doctest::Approx(e.idle).epsilon(1e-12));
      for (int s = 0; s < n; ++s)
        CHECK(std::abs(b.p_success[s] - e.success[s]) < 1e-14);
      double total = 1.0 - b.p_busy;
      for (int r = 1; r <= 4; ++r)
        {
          CHECK(std::abs(timing::intra_class_collision_prob(r, classes, tau) - e.intra[r - 1])
                < 1e-14);
          CHECK(std::abs(timing::inter_class_collision_prob(r, classes, tau) - e.inter[r - 1])
                < 1e-14);
          total += b.p_collision[r - 1];
        }
      for (double p : b.p_success)
        total += p;
      CHECK(std::abs(total - 1.0) < 1e-12);
      // equal payloads: the slowest colliding class sets the length
      CHECK(b.t_av == doctest::Approx(e.t_av).epsilon(1e-12));
    }
}

TEST_CASE("slot breakdown parts")
{
  MacTimingParams mac;
  const std::vector<timing::StationSlotInfo> st{{4, 1028, 0.0}};
  const std::vector<double> tau{2.0 / 33.0};
  const auto b = timing::slot_breakdown(st, tau, mac);
  CHECK(b.t_collision == 0.0);
  CHECK(b.t_error == 0.0);
  CHECK(b.t_av == doctest::Approx((31.0 / 33.0) * 20e-6 + (2.0 / 33.0) * 1326e-6));

  const std::vector<timing::StationSlotInfo> lossy{{1, 500, 0.25}};
  const auto c = timing::slot_breakdown(lossy, std::vector<double>{1.0}, mac);
  CHECK(c.t_success == doctest::Approx(0.75 * timing::success_duration(mac, 1e6, 500)));
  CHECK(c.t_error == doctest::Approx(0.25 * timing::collision_duration(mac, 1e6, 500)));
  CHECK_THROWS_AS(timing::slot_breakdown(st, std::vector<double>{0.1, 0.1}, mac), DomainError);
  CHECK_THROWS_AS(timing::make_class_map(std::vector<timing::StationSlotInfo>{{7, 10, 0.0}}),
                  DomainError);
}
