#pragma once

#include "dcf/phy.hpp"

#include <array>
#include <span>
#include <vector>

namespace dcf {

/// MAC/PHY timing constants, in seconds, bytes and bit/s. The PHY header
/// (preamble + PLCP header) is kept in bits at the basic rate only.
struct MacTimingParams
{
  double slot_s = 20e-6;
  double sifs_s = 10e-6;
  double difs_s = 50e-6;
  double eifs_s = 364e-6;        // stored, not used by the analytical model
  double prop_delay_s = 1e-6;
  double ack_timeout_s = 364e-6;
  int ack_bytes = 14;
  int mac_header_bytes = 28;
  int plcp_bits = 192;
  double basic_rate_bps = 1e6;

  void validate() const;
  bool operator==(const MacTimingParams &) const = default;
};

namespace timing {

/// What the slot model needs to know about one station.
struct StationSlotInfo
{
  int rate_class = 4;
  int payload_bytes = 1028;
  double per = 0.0;
};

/// Station indices grouped by rate class; entry r-1 holds class r.
using ClassMap = std::array<std::vector<std::size_t>, kNumRateClasses>;

ClassMap make_class_map(std::span<const StationSlotInfo> stations);

/// P_t = 1 - prod(1 - tau).
double busy_prob(std::span<const double> tau);

/// Probability that only station s transmits.
double success_prob(std::size_t s, std::span<const double> tau);

/// Duration of a successful DATA + ACK exchange at data rate R_D.
double success_duration(const MacTimingParams &p, double data_rate_bps, int payload_bytes);

/// Duration of a collision involving a frame at data rate R_D; also used for
/// a frame lost to channel errors.
double collision_duration(const MacTimingParams &p, double data_rate_bps, int payload_bytes);

/// At least two class-r stations transmit while every other class is silent.
double intra_class_collision_prob(int r, const ClassMap &classes, std::span<const double> tau);

/// At least one class-r and one higher-class station transmit while every
/// lower class is silent.
double inter_class_collision_prob(int r, const ClassMap &classes, std::span<const double> tau);

struct SlotBreakdown
{
  double t_idle = 0.0;
  double t_success = 0.0;
  double t_collision = 0.0;
  double t_error = 0.0;
  double t_av = 0.0;
  double p_busy = 0.0;
  std::array<double, kNumRateClasses> p_collision{};  // P_c1 + P_c2 per class
  std::array<double, kNumRateClasses> t_collision_class{};
  std::vector<double> p_success;                      // per station
};

/// Expected slot duration and its idle/success/collision/error components.
SlotBreakdown slot_breakdown(std::span<const StationSlotInfo> stations,
                             std::span<const double> tau, const MacTimingParams &p);

} // namespace timing
} // namespace dcf
