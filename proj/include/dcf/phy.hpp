#pragma once

#include <array>
#include <cmath>
#include <string_view>

namespace dcf {

enum class Modulation { dbpsk, dqpsk, cck5_5, cck11 };
enum class Fading { awgn, rayleigh };

std::string_view to_string(Modulation m);
std::string_view to_string(Fading f);

/// One 802.11b DSSS rate class.
struct RateClassSpec
{
  int id;                  // 1..4, ordered by data rate
  double data_rate_bps;
  Modulation modulation;
  int chips_per_symbol;
  int bits_per_symbol;
  double sensitivity_dbm;
};

inline constexpr int kNumRateClasses = 4;

inline constexpr std::array<RateClassSpec, kNumRateClasses> kRateClasses{{
    {1, 1e6, Modulation::dbpsk, 11, 1, -85.0},
    {2, 2e6, Modulation::dqpsk, 11, 2, -82.0},
    {3, 5.5e6, Modulation::cck5_5, 8, 4, -80.0},
    {4, 11e6, Modulation::cck11, 8, 8, -76.0},
}};

/// Throws DomainError for ids outside 1..4.
const RateClassSpec &rate_class(int id);

/// Log-distance link budget. Defaults are the 2.4 GHz ISM values used
/// throughout the validation scenarios.
struct PropagationParams
{
  double tx_power_dbm = 20.0;
  double noise_density_dbm_hz = -174.0;
  double noise_figure_db = 10.0;
  double bandwidth_hz = 22e6;
  double carrier_freq_hz = 2.4e9;
  double path_loss_exponent = 4.0;
  double ref_distance_m = 1.0;
  double tx_antenna_gain = 1.0;  // linear
  double rx_antenna_gain = 1.0;  // linear

  /// Throws DomainError when an invariant is violated.
  void validate() const;
  bool operator==(const PropagationParams &) const = default;
};

/// Frame lengths entering the FER. The PLCP preamble and header are sent at
/// the basic rate and counted in bits; the PSDU is MAC header + payload.
struct FrameLayout
{
  int plcp_bits = 192;
  int mac_header_bytes = 28;
  int payload_bytes = 1028;

  long psdu_bits() const { return 8L * (mac_header_bytes + payload_bytes); }
  long data_bits() const { return psdu_bits() + plcp_bits; }
};

namespace phy {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Free-space reference loss L_0 at d_0, in dB.
double reference_loss_db(const PropagationParams &prop);

/// Received SNR in dB at distance d >= d_0.
double received_snr_db(double distance_m, const PropagationParams &prop);

/// SNR per bit in dB: adds the spreading gain C_s/B_s.
double snr_per_bit_db(double snr_db, const RateClassSpec &spec);

/// Exponent used in the AWGN CCK expression. `printed` is (alpha/2 - 1)
/// with alpha = 4 or 8; `orthogonal` is the M-ary orthogonal 2^{B_s} - 1.
enum class CckExponent { printed, orthogonal };

/// Bit error probability for a modulation at linear SNR-per-bit gamma >= 0.
double ber(double gamma, Modulation mod, Fading channel,
           CckExponent cck = CckExponent::printed);

/// Frame error rate from the two bit error probabilities: PLCP bits at the
/// basic rate, PSDU bits at the data rate.
double fer_from_ber(const FrameLayout &layout, double ber_basic, double ber_data);

/// Frame error rate given the two linear SNRs-per-bit.
double fer(const FrameLayout &layout, const RateClassSpec &spec,
           Modulation basic_modulation, double gamma_basic, double gamma_data,
           Fading channel, CckExponent cck = CckExponent::printed);

/// Link parameters needed to go from a distance to a frame error rate.
struct LinkModel
{
  PropagationParams prop;
  Fading fading = Fading::rayleigh;
  Modulation basic_modulation = Modulation::dbpsk;
  CckExponent cck = CckExponent::printed;
};

/// received_snr -> snr_per_bit -> ber -> fer for one station.
double per_at_distance(double distance_m, const LinkModel &link,
                       const RateClassSpec &spec, const FrameLayout &layout);

/// Largest distance in [d_0, max_distance_m] with FER <= threshold, found by
/// bisection to 1 cm. Throws NoCrossingError when FER(d_0) > threshold.
double rate_switch_distance(const RateClassSpec &spec, const LinkModel &link,
                            const FrameLayout &layout, double per_threshold,
                            double max_distance_m = 1000.0);

/// Fastest class whose FER at d is within threshold; class 1 when none is.
int select_rate_class(double distance_m, const LinkModel &link,
                      const FrameLayout &layout, double per_threshold);

} // namespace phy
} // namespace dcf
