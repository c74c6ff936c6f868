#pragma once

#include "dcf/markov.hpp"
#include "dcf/phy.hpp"
#include "dcf/timing.hpp"

#include <limits>
#include <optional>
#include <variant>
#include <vector>

namespace dcf {

inline constexpr double kSaturated = std::numeric_limits<double>::infinity();

struct IdealChannel
{
  bool operator==(const IdealChannel &) const = default;
};

struct FixedPer
{
  double per = 0.0;
  bool operator==(const FixedPer &) const = default;
};

struct AtDistance
{
  double meters = 1.0;
  bool operator==(const AtDistance &) const = default;
};

using ChannelSpec = std::variant<IdealChannel, FixedPer, AtDistance>;

struct StationConfig
{
  /// 1..4; empty selects the class from the distance (AtDistance only).
  std::optional<int> rate_class = 4;
  /// Packet arrival rate; kSaturated pins q = 1.
  double lambda_pkt_s = kSaturated;
  int payload_bytes = 1028;
  ChannelSpec channel = IdealChannel{};

  bool saturated() const { return std::isinf(lambda_pkt_s); }
  bool operator==(const StationConfig &) const = default;
};

/// Everything network-wide: MAC timing, backoff, and the link model used for
/// stations placed at a distance.
struct NetworkParams
{
  MacTimingParams mac;
  BackoffParams backoff;
  Modulation basic_modulation = Modulation::dbpsk;
  PropagationParams prop;
  Fading fading = Fading::rayleigh;
  phy::CckExponent cck = phy::CckExponent::printed;
  double per_threshold = 8e-2;

  phy::LinkModel link() const { return {prop, fading, basic_modulation, cck}; }
  FrameLayout layout(int payload_bytes) const
  {
    return {mac.plcp_bits, mac.mac_header_bytes, payload_bytes};
  }
  void validate() const;
  bool operator==(const NetworkParams &) const = default;
};

struct Scenario
{
  NetworkParams net;
  std::vector<StationConfig> stations;

  /// Throws DomainError when the scenario is not usable.
  void validate() const;
  bool operator==(const Scenario &) const = default;
};

/// A station with its rate class and PER fixed.
struct ResolvedStation
{
  int rate_class = 4;
  double lambda_pkt_s = kSaturated;
  int payload_bytes = 1028;
  double per = 0.0;

  bool saturated() const { return std::isinf(lambda_pkt_s); }
  timing::StationSlotInfo slot_info() const { return {rate_class, payload_bytes, per}; }
};

/// Distance stations get their class (when unset) by rate switching at the
/// network PER threshold, then their PER from the link model.
std::vector<ResolvedStation> resolve(const Scenario &scn);

std::vector<timing::StationSlotInfo> slot_infos(std::span<const ResolvedStation> stations);

} // namespace dcf
