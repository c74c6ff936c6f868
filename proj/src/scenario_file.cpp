#include "dcf/scenario_file.hpp"

#include "dcf/error.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <cerrno>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace dcf::io {

namespace {

int
line_of(const YAML::Node &n)
{
  return n.Mark().line >= 0 ? n.Mark().line + 1 : 0;
}

[[noreturn]] void
fail(const YAML::Node &n, const std::string &what)
{
  throw ParseError(what, line_of(n));
}

std::string
scalar(const YAML::Node &n, const std::string &key)
{
  if (!n.IsScalar())
    fail(n, "'" + key + "' must be a scalar");
  return n.Scalar();
}

double
to_double(const YAML::Node &n, const std::string &key)
{
  const std::string s = scalar(n, key);
  double v = 0.0;
  const char *end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    fail(n, "'" + key + "' expects a finite number, got '" + s + "'");
  return v;
}

long long
to_integer(const YAML::Node &n, const std::string &key)
{
  const std::string s = scalar(n, key);
  long long v = 0;
  const char *end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end)
    fail(n, "'" + key + "' expects an integer, got '" + s + "'");
  return v;
}

int
to_int(const YAML::Node &n, const std::string &key)
{
  const long long v = to_integer(n, key);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    fail(n, "'" + key + "' is out of range");
  return static_cast<int>(v);
}

using Handler = std::function<void(const YAML::Node &)>;

// Runs the handler for each key present in a mapping; unknown keys are errors.
void
walk(const YAML::Node &section, const std::string &name,
     const std::map<std::string, Handler> &handlers)
{
  if (!section.IsMap())
    fail(section, "section '" + name + "' must be a mapping");
  for (const auto &kv : section)
    {
      const std::string key = kv.first.as<std::string>();
      const auto it = handlers.find(key);
      if (it == handlers.end())
        fail(kv.first, "unknown key '" + key + "' in section '" + name + "'");
      it->second(kv.second);
    }
}

Modulation
parse_basic_modulation(const YAML::Node &n)
{
  const std::string s = scalar(n, "basic_modulation");
  if (s == "dbpsk")
    return Modulation::dbpsk;
  if (s == "dqpsk")
    return Modulation::dqpsk;
  // Accepted here so that validation can report the unsupported pairing.
  if (s == "cck5.5")
    return Modulation::cck5_5;
  if (s == "cck11")
    return Modulation::cck11;
  fail(n, "basic_modulation must be dbpsk, dqpsk, cck5.5 or cck11");
}

Fading
parse_fading(const YAML::Node &n)
{
  const std::string s = scalar(n, "fading");
  if (s == "rayleigh")
    return Fading::rayleigh;
  if (s == "awgn")
    return Fading::awgn;
  fail(n, "fading must be rayleigh or awgn");
}

phy::CckExponent
parse_cck(const YAML::Node &n)
{
  const std::string s = scalar(n, "cck_exponent");
  if (s == "printed")
    return phy::CckExponent::printed;
  if (s == "orthogonal")
    return phy::CckExponent::orthogonal;
  fail(n, "cck_exponent must be printed or orthogonal");
}

ChannelSpec
parse_channel(const YAML::Node &n)
{
  const std::string s = scalar(n, "channel");
  if (s == "ideal")
    return IdealChannel{};
  auto number_after = [&](std::string_view prefix) {
    const std::string rest = s.substr(prefix.size());
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), v);
    if (rest.empty() || ec != std::errc() || ptr != rest.data() + rest.size())
      fail(n, "malformed channel '" + s + "'");
    return v;
  };
  if (s.rfind("per:", 0) == 0)
    return FixedPer{number_after("per:")};
  if (s.rfind("distance:", 0) == 0)
    return AtDistance{number_after("distance:")};
  fail(n, "channel must be ideal, per:<value> or distance:<meters>");
}

void
parse_network(const YAML::Node &sec, NetworkParams &net)
{
  auto &mac = net.mac;
  walk(sec, "network",
       {
           {"slot_time_s", [&](const YAML::Node &v) { mac.slot_s = to_double(v, "slot_time_s"); }},
           {"sifs_s", [&](const YAML::Node &v) { mac.sifs_s = to_double(v, "sifs_s"); }},
           {"difs_s", [&](const YAML::Node &v) { mac.difs_s = to_double(v, "difs_s"); }},
           {"eifs_s", [&](const YAML::Node &v) { mac.eifs_s = to_double(v, "eifs_s"); }},
           {"prop_delay_s",
            [&](const YAML::Node &v) { mac.prop_delay_s = to_double(v, "prop_delay_s"); }},
           {"ack_timeout_s",
            [&](const YAML::Node &v) { mac.ack_timeout_s = to_double(v, "ack_timeout_s"); }},
           {"ack_bytes", [&](const YAML::Node &v) { mac.ack_bytes = to_int(v, "ack_bytes"); }},
           {"mac_header_bytes",
            [&](const YAML::Node &v) { mac.mac_header_bytes = to_int(v, "mac_header_bytes"); }},
           {"plcp_bits", [&](const YAML::Node &v) { mac.plcp_bits = to_int(v, "plcp_bits"); }},
           {"basic_rate_bps",
            [&](const YAML::Node &v) { mac.basic_rate_bps = to_double(v, "basic_rate_bps"); }},
           {"cw_min", [&](const YAML::Node &v) { net.backoff.cw_min = to_int(v, "cw_min"); }},
           {"max_backoff_stage",
            [&](const YAML::Node &v) { net.backoff.max_stage = to_int(v, "max_backoff_stage"); }},
           {"basic_modulation",
            [&](const YAML::Node &v) { net.basic_modulation = parse_basic_modulation(v); }},
           {"fading", [&](const YAML::Node &v) { net.fading = parse_fading(v); }},
           {"cck_exponent", [&](const YAML::Node &v) { net.cck = parse_cck(v); }},
           {"per_threshold",
            [&](const YAML::Node &v) { net.per_threshold = to_double(v, "per_threshold"); }},
       });
}

void
parse_propagation(const YAML::Node &sec, PropagationParams &p)
{
  auto num = [](double &dst, const char *key) {
    return Handler([&dst, key](const YAML::Node &v) { dst = to_double(v, key); });
  };
  walk(sec, "propagation",
       {
           {"tx_power_dbm", num(p.tx_power_dbm, "tx_power_dbm")},
           {"noise_density_dbm_hz", num(p.noise_density_dbm_hz, "noise_density_dbm_hz")},
           {"noise_figure_db", num(p.noise_figure_db, "noise_figure_db")},
           {"bandwidth_hz", num(p.bandwidth_hz, "bandwidth_hz")},
           {"carrier_freq_hz", num(p.carrier_freq_hz, "carrier_freq_hz")},
           {"path_loss_exponent", num(p.path_loss_exponent, "path_loss_exponent")},
           {"ref_distance_m", num(p.ref_distance_m, "ref_distance_m")},
           {"tx_antenna_gain", num(p.tx_antenna_gain, "tx_antenna_gain")},
           {"rx_antenna_gain", num(p.rx_antenna_gain, "rx_antenna_gain")},
       });
}

void
parse_stations(const YAML::Node &sec, std::vector<StationConfig> &out)
{
  if (!sec.IsSequence())
    fail(sec, "'stations' must be a list");
  for (const auto &entry : sec)
    {
      StationConfig st;
      long long count = 1;
      walk(entry, "stations",
           {
               {"rate_class",
                [&](const YAML::Node &v) {
                  if (v.IsScalar() && v.Scalar() == "auto")
                    st.rate_class.reset();
                  else
                    st.rate_class = to_int(v, "rate_class");
                }},
               {"lambda_pkt_s",
                [&](const YAML::Node &v) {
                  if (v.IsScalar() && v.Scalar() == "saturated")
                    st.lambda_pkt_s = kSaturated;
                  else
                    st.lambda_pkt_s = to_double(v, "lambda_pkt_s");
                }},
               {"payload_bytes",
                [&](const YAML::Node &v) { st.payload_bytes = to_int(v, "payload_bytes"); }},
               {"channel", [&](const YAML::Node &v) { st.channel = parse_channel(v); }},
               {"count",
                [&](const YAML::Node &v) {
                  count = to_integer(v, "count");
                  if (count < 1 || count > 10000)
                    fail(v, "count must be in 1..10000");
                }},
           });
      for (long long i = 0; i < count; ++i)
        out.push_back(st);
    }
}

void
parse_solver(const YAML::Node &sec, solver::SolverOptions &o)
{
  walk(sec, "solver",
       {
           {"tol", [&](const YAML::Node &v) { o.tol = to_double(v, "tol"); }},
           {"max_iters", [&](const YAML::Node &v) { o.max_iters = to_int(v, "max_iters"); }},
           {"damping", [&](const YAML::Node &v) { o.damping = to_double(v, "damping"); }},
       });
}

void
parse_sim(const YAML::Node &sec, SimSettings &s)
{
  walk(sec, "sim",
       {
           {"duration_s", [&](const YAML::Node &v) { s.duration_s = to_double(v, "duration_s"); }},
           {"seeds",
            [&](const YAML::Node &v) {
              if (!v.IsSequence())
                fail(v, "'seeds' must be a list of integers");
              s.seeds.clear();
              for (const auto &e : v)
                {
                  const long long seed = to_integer(e, "seeds");
                  if (seed < 0)
                    fail(e, "seeds must be non-negative");
                  s.seeds.push_back(static_cast<std::uint64_t>(seed));
                }
            }},
           {"queue_capacity",
            [&](const YAML::Node &v) {
              const long long k = to_integer(v, "queue_capacity");
              if (k < 1)
                fail(v, "queue_capacity must be at least 1");
              s.queue_capacity = static_cast<std::size_t>(k);
            }},
           {"warmup_fraction",
            [&](const YAML::Node &v) { s.warmup_fraction = to_double(v, "warmup_fraction"); }},
       });
}

std::string
num(double v)
{
  return fmt::format("{}", v);
}

std::string
channel_text(const ChannelSpec &c)
{
  if (const auto *f = std::get_if<FixedPer>(&c))
    return "per:" + num(f->per);
  if (const auto *d = std::get_if<AtDistance>(&c))
    return "distance:" + num(d->meters);
  return "ideal";
}

StationConfig
station(int cls, double lambda, ChannelSpec channel = IdealChannel{})
{
  StationConfig st;
  st.rate_class = cls;
  st.lambda_pkt_s = lambda;
  st.payload_bytes = 1028;
  st.channel = channel;
  return st;
}

} // namespace

ScenarioFile
parse_scenario(std::string_view text)
{
  YAML::Node root;
  try
    {
      root = YAML::Load(std::string(text));
    }
  catch (const YAML::ParserException &e)
    {
      throw ParseError(e.msg, e.mark.line >= 0 ? e.mark.line + 1 : 0);
    }
  if (!root.IsMap())
    throw ParseError("scenario document must be a mapping", line_of(root));

  ScenarioFile out;
  out.scenario.stations.clear();
  bool have_stations = false;
  try
    {
      walk(root, "top level",
           {
               {"network", [&](const YAML::Node &v) { parse_network(v, out.scenario.net); }},
               {"propagation",
                [&](const YAML::Node &v) { parse_propagation(v, out.scenario.net.prop); }},
               {"stations",
                [&](const YAML::Node &v) {
                  parse_stations(v, out.scenario.stations);
                  have_stations = true;
                }},
               {"solver", [&](const YAML::Node &v) { parse_solver(v, out.solver); }},
               {"sim", [&](const YAML::Node &v) { parse_sim(v, out.sim); }},
           });
    }
  catch (const YAML::Exception &e)
    {
      throw ParseError(e.msg, e.mark.line >= 0 ? e.mark.line + 1 : 0);
    }
  if (!have_stations || out.scenario.stations.empty())
    throw ParseError("scenario needs a non-empty 'stations' list", line_of(root));
  try
    {
      out.scenario.validate();
    }
  catch (const DomainError &e)
    {
      throw ParseError(e.what());
    }
  return out;
}

ScenarioFile
load_scenario(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
    throw ParseError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string
dump_scenario(const ScenarioFile &f)
{
  const auto &net = f.scenario.net;
  const auto &mac = net.mac;
  const auto &p = net.prop;
  std::string out;
  auto line = [&out](std::string_view s) {
    out += s;
    out += '\n';
  };
  line("network:");
  line(fmt::format("  slot_time_s: {}", num(mac.slot_s)));
  line(fmt::format("  sifs_s: {}", num(mac.sifs_s)));
  line(fmt::format("  difs_s: {}", num(mac.difs_s)));
  line(fmt::format("  eifs_s: {}", num(mac.eifs_s)));
  line(fmt::format("  prop_delay_s: {}", num(mac.prop_delay_s)));
  line(fmt::format("  ack_timeout_s: {}", num(mac.ack_timeout_s)));
  line(fmt::format("  ack_bytes: {}", mac.ack_bytes));
  line(fmt::format("  mac_header_bytes: {}", mac.mac_header_bytes));
  line(fmt::format("  plcp_bits: {}", mac.plcp_bits));
  line(fmt::format("  basic_rate_bps: {}", num(mac.basic_rate_bps)));
  line(fmt::format("  cw_min: {}", net.backoff.cw_min));
  line(fmt::format("  max_backoff_stage: {}", net.backoff.max_stage));
  line(fmt::format("  basic_modulation: {}", to_string(net.basic_modulation)));
  line(fmt::format("  fading: {}", to_string(net.fading)));
  line(fmt::format("  cck_exponent: {}",
                   net.cck == phy::CckExponent::printed ? "printed" : "orthogonal"));
  line(fmt::format("  per_threshold: {}", num(net.per_threshold)));
  line("propagation:");
  line(fmt::format("  tx_power_dbm: {}", num(p.tx_power_dbm)));
  line(fmt::format("  noise_density_dbm_hz: {}", num(p.noise_density_dbm_hz)));
  line(fmt::format("  noise_figure_db: {}", num(p.noise_figure_db)));
  line(fmt::format("  bandwidth_hz: {}", num(p.bandwidth_hz)));
  line(fmt::format("  carrier_freq_hz: {}", num(p.carrier_freq_hz)));
  line(fmt::format("  path_loss_exponent: {}", num(p.path_loss_exponent)));
  line(fmt::format("  ref_distance_m: {}", num(p.ref_distance_m)));
  line(fmt::format("  tx_antenna_gain: {}", num(p.tx_antenna_gain)));
  line(fmt::format("  rx_antenna_gain: {}", num(p.rx_antenna_gain)));
  line("stations:");
  for (const auto &st : f.scenario.stations)
    {
      line(fmt::format("  - rate_class: {}",
                       st.rate_class ? std::to_string(*st.rate_class) : "auto"));
      line(fmt::format("    lambda_pkt_s: {}",
                       st.saturated() ? "saturated" : num(st.lambda_pkt_s)));
      line(fmt::format("    payload_bytes: {}", st.payload_bytes));
      line(fmt::format("    channel: \"{}\"", channel_text(st.channel)));
    }
  line("solver:");
  line(fmt::format("  tol: {}", num(f.solver.tol)));
  line(fmt::format("  max_iters: {}", f.solver.max_iters));
  line(fmt::format("  damping: {}", num(f.solver.damping)));
  line("sim:");
  line(fmt::format("  duration_s: {}", num(f.sim.duration_s)));
  line(fmt::format("  seeds: [{}]", fmt::join(f.sim.seeds, ", ")));
  line(fmt::format("  queue_capacity: {}", f.sim.queue_capacity));
  line(fmt::format("  warmup_fraction: {}", num(f.sim.warmup_fraction)));
  return out;
}

ScenarioFile
default_scenario()
{
  ScenarioFile f;
  f.scenario.stations = {station(4, kSaturated)};
  return f;
}

ScenarioFile
preset(std::string_view name)
{
  ScenarioFile f;
  auto &st = f.scenario.stations;
  if (name == "scenario1")
    {
      for (int i = 0; i < 9; ++i)
        st.push_back(station(4, 8000.0));
      st.push_back(station(1, 100.0));
    }
  else if (name == "scenario2")
    {
      for (int cls = 1; cls <= kNumRateClasses; ++cls)
        for (int i = 0; i < 2; ++i)
          st.push_back(station(cls, 50.0));
    }
  else if (name == "scenario3")
    {
      st.push_back(station(4, kSaturated, AtDistance{5.0}));
      st.push_back(station(4, kSaturated, AtDistance{5.0}));
      StationConfig mover = station(4, kSaturated, AtDistance{5.0});
      mover.rate_class.reset();
      st.push_back(mover);
    }
  else
    throw ParseError("unknown preset '" + std::string(name) + "'");
  return f;
}

std::vector<std::string>
preset_names()
{
  return {"scenario1", "scenario2", "scenario3"};
}

} // namespace dcf::io
