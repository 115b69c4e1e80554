#pragma once

#include <optional>

#include "psrsim/units.hpp"

namespace psrsim {

struct PsrConfig {
  bool enabled = false;
  double safety_margin_db = 3.0;  // must not exceed 5 dB
  bool grab_lowlatency = true;    // traffic classes allowed to seize SROs
  bool grab_broadband = false;
};

// Opportunities whose power cap falls below this level are not granted;
// budgets this small only close links for STAs sitting nearly on top of
// their own AP.
constexpr double kMinUsefulSrPowerDbm = -15.0;

// A granted spatial reuse window, bounded by the donor's triggered uplink.
struct SpatialReuseOpportunity {
  int donor_ap = -1;
  double rpl_dbm = 0.0;        // received power of the trigger frame
  double psr_input_dbm = 0.0;
  double i_ap_dbm = 0.0;
  TimeNs window_start_ns = 0;  // start of the triggered UL transmission
  TimeNs deadline_ns = 0;      // end of the triggered UL transmission
  double max_tx_power_dbm = 0.0;
};

// Acceptable interference at the donor AP:
// I_AP = UL_Target_RSSI - Min_SNR_MCS - Safety_Margin, with Min_SNR_MCS the
// threshold of the highest MCS of the following uplink data transmission.
double acceptable_interference_dbm(double ul_target_rssi_dbm,
                                   double min_snr_mcs_db,
                                   double safety_margin_db);

// PSR_INPUT = TX_PWR_AP + I_AP, advertised in the trigger frame.
double psr_input_dbm(double tf_tx_power_dbm, double i_ap_dbm);

// Transmit-power cap that keeps a spatial-reuse transmission within the
// donor's interference budget:
// TX_PWR - 10*log10(TX_BW / 20 MHz) <= PSR_INPUT - RPL,
// additionally capped at the STA hardware maximum.
double max_sr_tx_power_dbm(double psr_input_dbm, double rpl_dbm, int tx_bw_mhz,
                           double hw_max_dbm);

// Evaluates a decoded trigger frame against the SRO conditions: it must be
// inter-BSS, must allow PSR, and the resulting power cap must clear the
// usefulness floor. window/deadline bound the donor's UL transmission.
std::optional<SpatialReuseOpportunity> detect_sro(
    int sta_bss, int tf_bss, bool tf_psr_allowed, double tf_psr_input_dbm,
    double tf_i_ap_dbm, double rpl_dbm, int tx_bw_mhz, double hw_max_dbm,
    TimeNs window_start_ns, TimeNs deadline_ns);

// Duration rule: the SR PPDU plus SIFS plus ACK must end by the deadline.
bool sr_fits_window(TimeNs now, TimeNs ppdu_ns, TimeNs sifs_ns, TimeNs ack_ns,
                    TimeNs deadline_ns);

}  // namespace psrsim
