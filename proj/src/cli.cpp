#include "dcf/cli.hpp"

#include "dcf/error.hpp"
#include "dcf/scenario_file.hpp"
#include "dcf/sim.hpp"
#include "dcf/solver.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>

namespace dcf::cli {

namespace {

// Shortest representation that reads back to the same double.
std::string
num(double v)
{
  return fmt::format("{}", v);
}

std::string
lambda_text(double lambda)
{
  return std::isinf(lambda) ? "saturated" : num(lambda);
}

std::vector<double>
make_grid(double from, double to, int steps, bool log_spacing)
{
  if (steps < 1)
    throw ParseError("--steps must be at least 1");
  if (log_spacing && !(from > 0.0 && to > 0.0))
    throw ParseError("--log needs a positive range");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i)
    {
      const double u = steps == 1 ? 0.0 : double(i) / double(steps - 1);
      grid.push_back(log_spacing ? from * std::pow(to / from, u) : from + (to - from) * u);
    }
  grid.back() = steps == 1 ? from : to;
  return grid;
}

struct Source
{
  std::string scenario_path;
  std::string preset_name;

  io::ScenarioFile load() const
  {
    if (!scenario_path.empty() && !preset_name.empty())
      throw ParseError("--scenario and --preset are mutually exclusive");
    if (!preset_name.empty())
      return io::preset(preset_name);
    if (!scenario_path.empty())
      return io::load_scenario(scenario_path);
    return io::default_scenario();
  }
};

// Parses "all", "station:k" or "distance:k" (k 1-based).
solver::SweepAxis
parse_axis(const std::string &text, std::size_t n_stations)
{
  solver::SweepAxis axis;
  if (text == "all")
    return axis;
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  if (colon == std::string::npos || (kind != "station" && kind != "distance"))
    throw ParseError("--axis must be all, station:<k> or distance:<k>");
  std::size_t k = 0;
  try
    {
      std::size_t used = 0;
      k = std::stoul(text.substr(colon + 1), &used);
      if (used != text.size() - colon - 1)
        throw std::invalid_argument("trailing");
    }
  catch (const std::exception &)
    {
      throw ParseError("malformed station index in --axis '" + text + "'");
    }
  if (k < 1 || k > n_stations)
    throw ParseError("--axis station index out of range");
  axis.kind = kind == "station" ? solver::SweepAxis::Kind::station_rate
                                : solver::SweepAxis::Kind::distance;
  axis.station = k - 1;
  return axis;
}

std::string
axis_column(const solver::SweepAxis &axis)
{
  switch (axis.kind)
    {
    case solver::SweepAxis::Kind::common_rate: return "lambda_pkt_s";
    case solver::SweepAxis::Kind::station_rate:
      return fmt::format("s{}_lambda_pkt_s", axis.station + 1);
    case solver::SweepAxis::Kind::distance:
      return fmt::format("s{}_distance_m", axis.station + 1);
    }
  return "x";
}

std::string
render_solve_text(const io::ScenarioFile &file)
{
  const auto stations = resolve(file.scenario);
  const auto op = solver::solve_operating_point(file.scenario.net, stations, file.solver);
  const auto rep = solver::aggregate_throughput(op, file.scenario.net, stations);
  std::string s;
  for (std::size_t i = 0; i < stations.size(); ++i)
    {
      const auto &st = stations[i];
      s += fmt::format("station {}: class {}, lambda {} pkt/s, payload {} B, PER {}\n", i + 1,
                       st.rate_class, lambda_text(st.lambda_pkt_s), st.payload_bytes,
                       num(st.per));
      s += fmt::format("  tau={} P_col={} P_eq={} q={}\n", num(op.tau[i]), num(op.p_col[i]),
                       num(op.p_eq[i]), num(op.q[i]));
      s += fmt::format("  throughput {} bit/s\n", num(rep.per_station_bps[i]));
    }
  s += fmt::format("T_av {} s (idle {}, success {}, collision {}, error {})\n", num(op.t_av),
                   num(op.breakdown.t_idle), num(op.breakdown.t_success),
                   num(op.breakdown.t_collision), num(op.breakdown.t_error));
  s += fmt::format("aggregate {} bit/s\n", num(rep.aggregate_bps));
  s += fmt::format("linear model {} bit/s ({} the linear region)\n", num(rep.linear_bps),
                   rep.in_region ? "inside" : "outside");
  s += fmt::format("converged in {} iterations, residual {}\n", op.iterations, num(op.residual));
  return s;
}

std::string
render_solve_csv(const io::ScenarioFile &file)
{
  const auto stations = resolve(file.scenario);
  const auto op = solver::solve_operating_point(file.scenario.net, stations, file.solver);
  const auto rep = solver::aggregate_throughput(op, file.scenario.net, stations);
  std::string s = "station,rate_class,lambda_pkt_s,payload_bytes,per,tau,p_col,p_eq,q,"
                  "throughput_bps\n";
  for (std::size_t i = 0; i < stations.size(); ++i)
    {
      const auto &st = stations[i];
      s += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", i + 1, st.rate_class,
                       lambda_text(st.lambda_pkt_s), st.payload_bytes, num(st.per),
                       num(op.tau[i]), num(op.p_col[i]), num(op.p_eq[i]), num(op.q[i]),
                       num(rep.per_station_bps[i]));
    }
  s += fmt::format("aggregate,,,,,,,,,{}\n", num(rep.aggregate_bps));
  return s;
}

std::string
render_sweep(const io::ScenarioFile &file, const solver::SweepAxis &axis,
             const std::vector<double> &grid)
{
  const auto points = solver::sweep(file.scenario, axis, grid, file.solver);
  const std::size_t n = file.scenario.stations.size();
  std::string s = axis_column(axis);
  for (std::size_t i = 1; i <= n; ++i)
    s += fmt::format(",s{0}_rate_class,s{0}_per,s{0}_tau,s{0}_bps", i);
  s += ",t_av_s,aggregate_bps,linear_bps,in_region\n";
  for (const auto &p : points)
    {
      s += num(p.x);
      for (std::size_t i = 0; i < n; ++i)
        s += fmt::format(",{},{},{},{}", p.stations[i].rate_class, num(p.stations[i].per),
                         num(p.op.tau[i]), num(p.report.per_station_bps[i]));
      s += fmt::format(",{},{},{},{}\n", num(p.op.t_av), num(p.report.aggregate_bps),
                       num(p.report.linear_bps), p.report.in_region ? 1 : 0);
    }
  return s;
}

double
deviation(double sim, double model)
{
  return model != 0.0 ? (sim - model) / model : (sim == 0.0 ? 0.0 : INFINITY);
}

std::string
render_sim(const io::ScenarioFile &file)
{
  const auto stations = resolve(file.scenario);
  const auto &net = file.scenario.net;
  const auto op = solver::solve_operating_point(net, stations, file.solver);
  const auto model = solver::aggregate_throughput(op, net, stations);
  const auto rep = sim::batch(net, stations, file.sim.options(file.sim.seeds.front()),
                              file.sim.seeds);

  std::vector<double> tau_sim(stations.size(), 0.0);
  for (const auto &r : rep.runs)
    for (std::size_t i = 0; i < stations.size(); ++i)
      tau_sim[i] += r.stations[i].tau_estimate / double(rep.runs.size());

  std::string s = "station,rate_class,lambda_pkt_s,per,sim_tau,model_tau,sim_bps,"
                  "sim_stddev_bps,model_bps,deviation\n";
  for (std::size_t i = 0; i < stations.size(); ++i)
    {
      const auto &st = stations[i];
      s += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", i + 1, st.rate_class,
                       lambda_text(st.lambda_pkt_s), num(st.per), num(tau_sim[i]),
                       num(op.tau[i]), num(rep.mean_station_bps[i]),
                       num(rep.stddev_station_bps[i]), num(model.per_station_bps[i]),
                       num(deviation(rep.mean_station_bps[i], model.per_station_bps[i])));
    }
  s += fmt::format("aggregate,,,,,,{},{},{},{}\n", num(rep.mean_aggregate_bps),
                   num(rep.stddev_aggregate_bps), num(model.aggregate_bps),
                   num(deviation(rep.mean_aggregate_bps, model.aggregate_bps)));
  return s;
}

std::string
render_critical_rates(const io::ScenarioFile &file, int payload_bytes)
{
  const auto &net = file.scenario.net;
  net.validate();
  if (payload_bytes < 0)
    throw ParseError("--payload-bytes must be non-negative");
  std::string s = "rate_class,data_rate_bps,payload_bytes,success_time_s,critical_rate_pkt_s\n";
  for (const auto &spec : kRateClasses)
    {
      const double ts = timing::success_duration(net.mac, spec.data_rate_bps, payload_bytes);
      s += fmt::format("{},{},{},{},{}\n", spec.id, num(spec.data_rate_bps), payload_bytes,
                       num(ts), num(solver::critical_rate(spec, net.mac, net.backoff,
                                                          payload_bytes)));
    }
  return s;
}

std::string
render_phy_curves(const io::ScenarioFile &file, int cls, std::optional<Fading> fading,
                  bool snr_axis, const std::vector<double> &grid, int payload_bytes)
{
  NetworkParams net = file.scenario.net;
  if (fading)
    net.fading = *fading;
  net.validate();
  const auto &spec = rate_class(cls);
  const auto &basic = rate_class(net.basic_modulation == Modulation::dqpsk ? 2 : 1);
  const FrameLayout layout = net.layout(payload_bytes);

  std::string s = snr_axis ? "snr_db" : "distance_m";
  s += ",snr_per_bit_db,ber_basic,ber,fer\n";
  for (double x : grid)
    {
      const double snr = snr_axis ? x : phy::received_snr_db(x, net.prop);
      const double gb = phy::db_to_linear(phy::snr_per_bit_db(snr, basic));
      const double gd_db = phy::snr_per_bit_db(snr, spec);
      const double gd = phy::db_to_linear(gd_db);
      const double pb_basic = phy::ber(gb, net.basic_modulation, net.fading, net.cck);
      const double pb = phy::ber(gd, spec.modulation, net.fading, net.cck);
      s += fmt::format("{},{},{},{},{}\n", num(x), num(gd_db), num(pb_basic), num(pb),
                       num(phy::fer_from_ber(layout, pb_basic, pb)));
    }
  return s;
}

void
emit(const std::string &text, const std::string &out_path, std::ostream &out)
{
  if (out_path.empty())
    {
      out << text;
      return;
    }
  std::ofstream f(out_path, std::ios::binary);
  if (!f)
    throw Error("cannot open '" + out_path + "' for writing");
  f << text;
  if (!f)
    throw Error("failed writing '" + out_path + "'");
}

} // namespace

int
run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
  CLI::App app{"Analytical model and simulator for multirate 802.11 DCF networks", "dcfmodel"};
  app.require_subcommand(0, 1);

  Source src;
  std::string out_path;
  bool dump_defaults = false;
  app.add_option("--scenario", src.scenario_path, "Scenario file (YAML)");
  app.add_option("--preset", src.preset_name, "Built-in scenario")
      ->check(CLI::IsMember(io::preset_names()));
  app.add_option("--out", out_path, "Write output here instead of stdout");
  app.add_flag("--dump-defaults", dump_defaults,
               "Print the scenario in effect (defaults if none given) and exit");

  auto *solve = app.add_subcommand("solve", "Solve the operating point");
  bool csv = false;
  solve->add_flag("--csv", csv, "CSV instead of a text summary");

  auto *sweep = app.add_subcommand("sweep", "Solve along a parameter axis, CSV output");
  std::string axis_text = "all";
  double from = 0.0;
  double to = 0.0;
  int steps = 50;
  bool log_spacing = false;
  sweep->add_option("--axis", axis_text,
                    "all (common arrival rate), station:<k> (arrival rate of station k) or "
                    "distance:<k> (distance of station k)")
      ->capture_default_str();
  sweep->add_option("--from", from)->required();
  sweep->add_option("--to", to)->required();
  sweep->add_option("--steps", steps)->capture_default_str();
  sweep->add_flag("--log", log_spacing, "Geometric spacing");

  auto *simc = app.add_subcommand("sim", "Simulate and compare with the model");
  std::optional<std::uint64_t> seed;
  std::vector<std::uint64_t> seeds;
  std::optional<double> duration;
  simc->add_option("--seed", seed, "Single seed");
  simc->add_option("--seeds", seeds, "Comma-separated seeds")->delimiter(',');
  simc->add_option("--duration", duration, "Virtual seconds per run");

  auto *crit = app.add_subcommand("critical-rates", "Critical arrival rate per rate class");
  int crit_payload = 1028;
  crit->add_option("--payload-bytes", crit_payload)->capture_default_str();

  auto *curves = app.add_subcommand("phy-curves", "BER and FER against distance or SNR");
  int cls = 4;
  std::string channel;
  std::string phy_axis = "distance";
  double phy_from = 1.0;
  double phy_to = 100.0;
  int phy_steps = 100;
  int phy_payload = 1028;
  curves->add_option("--class", cls)->check(CLI::Range(1, kNumRateClasses))->capture_default_str();
  curves->add_option("--channel", channel, "awgn or rayleigh (default: scenario fading)")
      ->check(CLI::IsMember({"awgn", "rayleigh"}));
  curves->add_option("--axis", phy_axis)->check(CLI::IsMember({"distance", "snr"}))
      ->capture_default_str();
  curves->add_option("--from", phy_from)->capture_default_str();
  curves->add_option("--to", phy_to)->capture_default_str();
  curves->add_option("--steps", phy_steps)->capture_default_str();
  curves->add_option("--payload-bytes", phy_payload)->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty())
    reversed.pop_back();
  try
    {
      app.parse(reversed);
    }
  catch (const CLI::ParseError &e)
    {
      const int code = app.exit(e, out, err);
      return code == 0 ? kOk : kParseError;
    }

  try
    {
      io::ScenarioFile file = src.load();
      std::string text;
      if (dump_defaults)
        text = io::dump_scenario(file);
      else if (*solve)
        text = csv ? render_solve_csv(file) : render_solve_text(file);
      else if (*sweep)
        text = render_sweep(file, parse_axis(axis_text, file.scenario.stations.size()),
                            make_grid(from, to, steps, log_spacing));
      else if (*simc)
        {
          if (seed && !seeds.empty())
            throw ParseError("--seed and --seeds are mutually exclusive");
          if (seed)
            file.sim.seeds = {*seed};
          else if (!seeds.empty())
            file.sim.seeds = seeds;
          if (duration)
            file.sim.duration_s = *duration;
          if (file.sim.seeds.empty())
            throw ParseError("no seeds given");
          text = render_sim(file);
        }
      else if (*crit)
        text = render_critical_rates(file, crit_payload);
      else if (*curves)
        {
          std::optional<Fading> fading;
          if (!channel.empty())
            fading = channel == "awgn" ? Fading::awgn : Fading::rayleigh;
          text = render_phy_curves(file, cls, fading, phy_axis == "snr",
                                   make_grid(phy_from, phy_to, phy_steps, false), phy_payload);
        }
      else
        {
          out << app.help();
          return kOk;
        }
      emit(text, out_path, out);
      return kOk;
    }
  catch (const ParseError &e)
    {
      err << "error: " << e.what() << '\n';
      return kParseError;
    }
  catch (const DivergenceError &e)
    {
      err << "error: " << e.what() << " (residual " << num(e.residual()) << ")\n";
      return kDivergence;
    }
  catch (const NumericalError &e)
    {
      err << "error: " << e.what() << '\n';
      return kDivergence;
    }
  catch (const UnsupportedCombination &e)
    {
      err << "error: " << e.what() << '\n';
      return kUnsupportedPhy;
    }
  catch (const std::exception &e)
    {
      err << "error: " << e.what() << '\n';
      return kFailure;
    }
}

} // namespace dcf::cli
