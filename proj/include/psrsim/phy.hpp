#pragma once

#include <cstdint>
#include <vector>

#include "psrsim/units.hpp"

namespace psrsim {

class Rng;

// HE OFDM numerology: 12.8 us symbol + 0.8 us cyclic prefix.
constexpr TimeNs kSymbolDurationNs = 13'600;
constexpr TimeNs kPreambleNs = 44'000;
constexpr double kLegacyControlRateMbps = 24.0;

struct McsEntry {
  int index = 0;
  int bits_per_subcarrier = 1;  // modulation bits
  double code_rate = 0.5;
  int code_rate_x12 = 6;        // code_rate * 12, exact
  double min_snr_db = 0.0;      // lowest SNR giving <= 10% packet error rate
};

// MCS 0..11 with standard-practice minimum-SNR thresholds.
const std::vector<McsEntry>& default_mcs_table();

// returns a copy of the default table with min_snr_db replaced
std::vector<McsEntry> mcs_table_with_min_snr(const std::vector<double>& min_snr_db);

int data_subcarriers(int bandwidth_mhz);  // 20->234, 40->468, 80->980

// Exact integer 12x the data bits carried per OFDM symbol by one stream.
std::int64_t bits_x12_per_symbol(const McsEntry& mcs, int bandwidth_mhz);

double bits_per_symbol(const McsEntry& mcs, int bandwidth_mhz);
double data_rate_mbps(const McsEntry& mcs, int bandwidth_mhz, int n_streams);

// Preamble plus the data symbols needed for payload_bytes across n_streams.
TimeNs ppdu_duration_ns(std::int64_t payload_bytes, const McsEntry& mcs,
                        int bandwidth_mhz, int n_streams);

double noise_floor_dbm(int bandwidth_mhz, double noise_figure_db);

// Zero-forcing degrees-of-freedom abstraction: the desired-signal array gain
// left after separating n_streams spatially multiplexed uplink streams.
double zf_gain(int n_ap_antennas, int n_streams);  // linear, N - K + 1

double sinr_db(double desired_dbm, double zf_gain_linear, double noise_mw,
               double interference_mw);

// Post-filter SINR at an AP receiving k_streams spatially multiplexed
// streams with n_antennas. Spare degrees of freedom cancel the strongest
// inter-BSS interferers; each cancelled interferer costs one degree of
// array gain (N - K - J + 1). The number cancelled is chosen to maximize
// the resulting SINR. interferers_mw is consumed (sorted in place).
double zf_receive_sinr_db(double desired_dbm, int n_antennas, int k_streams,
                          double noise_mw, std::vector<double>& interferers_mw);

// Highest-index MCS whose threshold is met; MCS 0 if none qualifies.
const McsEntry& select_mcs(const std::vector<McsEntry>& table, double sinr_db);

// 1.0 below min_snr - 3 dB, linear ramp down to 0.10 at min_snr, then an
// exponential tail 0.10*exp(-(sinr - min_snr)).
double packet_error_rate(double sinr_db, double min_snr_db);

bool reception_succeeds(double sinr_db, const McsEntry& mcs, Rng& rng);

}  // namespace psrsim
