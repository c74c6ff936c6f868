#include "dcf/phy.hpp"

#include "dcf/error.hpp"
#include "dcf/special.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace dcf {

std::string_view
to_string(Modulation m)
{
  switch (m)
    {
    case Modulation::dbpsk: return "dbpsk";
    case Modulation::dqpsk: return "dqpsk";
    case Modulation::cck5_5: return "cck5.5";
    case Modulation::cck11: return "cck11";
    }
  return "?";
}

std::string_view
to_string(Fading f)
{
  return f == Fading::awgn ? "awgn" : "rayleigh";
}

const RateClassSpec &
rate_class(int id)
{
  if (id < 1 || id > kNumRateClasses)
    throw DomainError("rate class must be in 1..4, got " + std::to_string(id));
  return kRateClasses[static_cast<std::size_t>(id - 1)];
}

void
PropagationParams::validate() const
{
  if (!(path_loss_exponent >= 2.0 && path_loss_exponent <= 6.0))
    throw DomainError("path_loss_exponent must be in [2, 6]");
  if (!(ref_distance_m > 0.0))
    throw DomainError("ref_distance_m must be positive");
  if (!(bandwidth_hz > 0.0))
    throw DomainError("bandwidth_hz must be positive");
  if (!(carrier_freq_hz > 0.0))
    throw DomainError("carrier_freq_hz must be positive");
  if (!(tx_antenna_gain > 0.0) || !(rx_antenna_gain > 0.0))
    throw DomainError("antenna gains must be positive");
}

namespace phy {

namespace {

constexpr double kSpeedOfLight = 299792458.0;

double
alpha_of(Modulation mod)
{
  return mod == Modulation::cck5_5 ? 4.0 : 8.0;
}

// 1 - (1 - p)^n without cancellation for small p.
double
block_error(double p, double n)
{
  if (p <= 0.0)
    return 0.0;
  if (p >= 1.0)
    return 1.0;
  return -std::expm1(n * std::log1p(-p));
}

double
awgn_dqpsk(double gamma)
{
  const double c = std::numbers::sqrt2 / 2.0;
  const double a = std::sqrt(2.0 * gamma * (1.0 - c));
  const double b = std::sqrt(2.0 * gamma * (1.0 + c));
  // I_0(ab) e^{-(a^2+b^2)/2} = [e^{-ab} I_0(ab)] e^{-(a-b)^2/2}
  const double tail = special::bessel_i0e(a * b) * std::exp(-0.5 * (a - b) * (a - b));
  return special::marcum_q1(a, b) - 0.5 * tail;
}

// Union form over the correlator outputs with standard-normal densities on
// both integrals. The inner integral is erf((z + sqrt(g)) / sqrt(2)); the
// result is rewritten as Phi(-sqrt(g)) + int (1 - inner^e) phi(z) dz so the
// small tail is not lost to cancellation against 1.
double
awgn_cck(double gamma, Modulation mod, CckExponent cck)
{
  const double root = std::sqrt(gamma);
  const double exponent = cck == CckExponent::printed
                              ? alpha_of(mod) / 2.0 - 1.0
                              : std::exp2(mod == Modulation::cck5_5 ? 4 : 8) - 1.0;
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  auto integrand = [&](double z) {
    const double u = (z + root) / std::numbers::sqrt2;
    const double miss = std::erfc(u);
    const double one_minus = miss >= 1.0 ? 1.0 : -std::expm1(exponent * std::log1p(-miss));
    return one_minus * inv_sqrt_2pi * std::exp(-0.5 * z * z);
  };
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  const double body = gauss_kronrod<double, 31>::integrate(integrand, -root, root + 10.0,
                                                           15, 1e-10, &err);
  const double lower = 0.5 * std::erfc(root / std::numbers::sqrt2);
  return std::clamp(lower + body, 0.0, 1.0);
}

double
rayleigh_cck(double gamma, Modulation mod)
{
  const int alpha = static_cast<int>(alpha_of(mod));
  const int n = alpha - 1;
  double sum = 0.0;
  double binom = 1.0;
  for (int i = 1; i <= n; ++i)
    {
      binom = binom * (n - i + 1) / i;
      const double sign = (i % 2 == 1) ? 1.0 : -1.0;
      sum += sign * binom / (1.0 + i + i * gamma);
    }
  return std::exp2(n) / (std::exp2(alpha) - 1.0) * sum;
}

} // namespace

double
reference_loss_db(const PropagationParams &prop)
{
  const double wavelength = kSpeedOfLight / prop.carrier_freq_hz;
  const double num = prop.tx_antenna_gain * prop.rx_antenna_gain * wavelength * wavelength;
  const double den = std::pow(4.0 * std::numbers::pi, 2.0)
                     * std::pow(prop.ref_distance_m, prop.path_loss_exponent);
  return -10.0 * std::log10(num / den);
}

double
received_snr_db(double distance_m, const PropagationParams &prop)
{
  prop.validate();
  if (!(distance_m >= prop.ref_distance_m))
    throw DomainError("distance is inside the reference distance");
  const double loss = reference_loss_db(prop)
                      + 10.0 * prop.path_loss_exponent
                            * std::log10(distance_m / prop.ref_distance_m);
  const double rx_power = prop.tx_power_dbm - loss;
  return rx_power - prop.noise_density_dbm_hz - 10.0 * std::log10(prop.bandwidth_hz)
         - prop.noise_figure_db;
}

double
snr_per_bit_db(double snr_db, const RateClassSpec &spec)
{
  return snr_db + 10.0 * std::log10(double(spec.chips_per_symbol) / spec.bits_per_symbol);
}

double
ber(double gamma, Modulation mod, Fading channel, CckExponent cck)
{
  if (!(gamma >= 0.0))
    throw DomainError("ber: gamma must be non-negative");
  if (std::isinf(gamma))
    return 0.0;
  double p = 0.0;
  if (channel == Fading::rayleigh)
    {
      switch (mod)
        {
        case Modulation::dbpsk:
          p = 1.0 / (2.0 * (1.0 + gamma));
          break;
        case Modulation::dqpsk:
          {
            const double g = gamma * std::numbers::sqrt2 / 2.0;
            p = 0.5 * (1.0 - std::sqrt(g / (1.0 + g)));
            break;
          }
        case Modulation::cck5_5:
        case Modulation::cck11:
          p = rayleigh_cck(gamma, mod);
          break;
        default:
          throw UnsupportedCombination("no Rayleigh BER for this modulation");
        }
    }
  else if (channel == Fading::awgn)
    {
      switch (mod)
        {
        case Modulation::dbpsk:
          p = 0.5 * std::erfc(std::sqrt(gamma));
          break;
        case Modulation::dqpsk:
          p = awgn_dqpsk(gamma);
          break;
        case Modulation::cck5_5:
        case Modulation::cck11:
          p = awgn_cck(gamma, mod, cck);
          break;
        default:
          throw UnsupportedCombination("no AWGN BER for this modulation");
        }
    }
  else
    throw UnsupportedCombination("unknown channel model");

  if (std::isnan(p))
    throw NumericalError("ber evaluated to NaN");
  return std::clamp(p, 0.0, 1.0);
}

double
fer_from_ber(const FrameLayout &layout, double ber_basic, double ber_data)
{
  const double plcp = block_error(ber_basic, double(layout.plcp_bits));
  const double psdu = block_error(ber_data, double(layout.psdu_bits()));
  return 1.0 - (1.0 - plcp) * (1.0 - psdu);
}

double
fer(const FrameLayout &layout, const RateClassSpec &spec, Modulation basic_modulation,
    double gamma_basic, double gamma_data, Fading channel, CckExponent cck)
{
  const double pb_basic = ber(gamma_basic, basic_modulation, channel, cck);
  const double pb_data = ber(gamma_data, spec.modulation, channel, cck);
  return fer_from_ber(layout, pb_basic, pb_data);
}

double
per_at_distance(double distance_m, const LinkModel &link, const RateClassSpec &spec,
                const FrameLayout &layout)
{
  const double snr = received_snr_db(distance_m, link.prop);
  const RateClassSpec &basic =
      rate_class(link.basic_modulation == Modulation::dqpsk ? 2 : 1);
  const double gamma_basic = db_to_linear(snr_per_bit_db(snr, basic));
  const double gamma_data = db_to_linear(snr_per_bit_db(snr, spec));
  return fer(layout, spec, link.basic_modulation, gamma_basic, gamma_data, link.fading,
             link.cck);
}

double
rate_switch_distance(const RateClassSpec &spec, const LinkModel &link,
                     const FrameLayout &layout, double per_threshold,
                     double max_distance_m)
{
  double lo = link.prop.ref_distance_m;
  double hi = max_distance_m;
  if (!(hi > lo))
    throw DomainError("rate_switch_distance: empty search bracket");
  if (per_at_distance(lo, link, spec, layout) > per_threshold)
    throw NoCrossingError("FER exceeds the threshold already at the reference distance");
  if (per_at_distance(hi, link, spec, layout) <= per_threshold)
    return hi;
  while (hi - lo > 0.01)
    {
      const double mid = 0.5 * (lo + hi);
      if (per_at_distance(mid, link, spec, layout) <= per_threshold)
        lo = mid;
      else
        hi = mid;
    }
  return lo;
}

int
select_rate_class(double distance_m, const LinkModel &link, const FrameLayout &layout,
                  double per_threshold)
{
  for (int id = kNumRateClasses; id > 1; --id)
    if (per_at_distance(distance_m, link, rate_class(id), layout) <= per_threshold)
      return id;
  return 1;
}

} // namespace phy
} // namespace dcf
