#include "dcf/scenario.hpp"

#include "dcf/error.hpp"

#include <string>

namespace dcf {

void
NetworkParams::validate() const
{
  mac.validate();
  backoff.validate();
  prop.validate();
  if (basic_modulation != Modulation::dbpsk && basic_modulation != Modulation::dqpsk)
    throw UnsupportedCombination("CCK cannot serve as the basic-rate modulation");
  if (!(per_threshold > 0.0 && per_threshold <= 1.0))
    throw DomainError("per_threshold must lie in (0, 1]");
}

void
Scenario::validate() const
{
  net.validate();
  if (stations.empty())
    throw DomainError("scenario has no stations");
  for (std::size_t s = 0; s < stations.size(); ++s)
    {
      const auto &st = stations[s];
      const std::string tag = "station " + std::to_string(s + 1) + ": ";
      if (st.rate_class && (*st.rate_class < 1 || *st.rate_class > kNumRateClasses))
        throw DomainError(tag + "rate class must be in 1..4");
      if (!st.rate_class && !std::holds_alternative<AtDistance>(st.channel))
        throw DomainError(tag + "automatic rate class needs a distance channel");
      if (!(st.lambda_pkt_s >= 0.0))
        throw DomainError(tag + "arrival rate must be non-negative");
      if (st.payload_bytes < 0)
        throw DomainError(tag + "payload must be non-negative");
      if (const auto *f = std::get_if<FixedPer>(&st.channel); f && !(f->per >= 0.0 && f->per <= 1.0))
        throw DomainError(tag + "PER must lie in [0, 1]");
      if (const auto *d = std::get_if<AtDistance>(&st.channel);
          d && !(d->meters >= net.prop.ref_distance_m))
        throw DomainError(tag + "distance must be at least the reference distance");
    }
}

std::vector<ResolvedStation>
resolve(const Scenario &scn)
{
  scn.validate();
  const auto link = scn.net.link();
  std::vector<ResolvedStation> out;
  out.reserve(scn.stations.size());
  for (const auto &st : scn.stations)
    {
      ResolvedStation r;
      r.lambda_pkt_s = st.lambda_pkt_s;
      r.payload_bytes = st.payload_bytes;
      const FrameLayout layout = scn.net.layout(st.payload_bytes);
      if (const auto *d = std::get_if<AtDistance>(&st.channel))
        {
          r.rate_class = st.rate_class ? *st.rate_class
                                       : phy::select_rate_class(d->meters, link, layout,
                                                                scn.net.per_threshold);
          r.per = phy::per_at_distance(d->meters, link, rate_class(r.rate_class), layout);
        }
      else
        {
          r.rate_class = *st.rate_class;
          if (const auto *f = std::get_if<FixedPer>(&st.channel))
            r.per = f->per;
        }
      out.push_back(r);
    }
  return out;
}

std::vector<timing::StationSlotInfo>
slot_infos(std::span<const ResolvedStation> stations)
{
  std::vector<timing::StationSlotInfo> out;
  out.reserve(stations.size());
  for (const auto &s : stations)
    out.push_back(s.slot_info());
  return out;
}

} // namespace dcf
