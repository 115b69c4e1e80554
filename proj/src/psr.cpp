#include "psrsim/psr.hpp"

#include <algorithm>
#include <cmath>

namespace psrsim {

double acceptable_interference_dbm(double ul_target_rssi_dbm,
                                   double min_snr_mcs_db,
                                   double safety_margin_db) {
  return ul_target_rssi_dbm - min_snr_mcs_db - safety_margin_db;
}

double psr_input_dbm(double tf_tx_power_dbm, double i_ap_dbm) {
  return tf_tx_power_dbm + i_ap_dbm;
}

double max_sr_tx_power_dbm(double psr_input_dbm, double rpl_dbm, int tx_bw_mhz,
                           double hw_max_dbm) {
  const double bw_term = 10.0 * std::log10(tx_bw_mhz / 20.0);
  return std::min(psr_input_dbm - rpl_dbm + bw_term, hw_max_dbm);
}

std::optional<SpatialReuseOpportunity> detect_sro(
    int sta_bss, int tf_bss, bool tf_psr_allowed, double tf_psr_input_dbm,
    double tf_i_ap_dbm, double rpl_dbm, int tx_bw_mhz, double hw_max_dbm,
    TimeNs window_start_ns, TimeNs deadline_ns) {
  if (tf_bss == sta_bss) return std::nullopt;  // Condition 1: inter-BSS only
  if (!tf_psr_allowed) return std::nullopt;
  const double cap =
      max_sr_tx_power_dbm(tf_psr_input_dbm, rpl_dbm, tx_bw_mhz, hw_max_dbm);
  if (cap < kMinUsefulSrPowerDbm) return std::nullopt;  // Condition 2 unsatisfiable
  SpatialReuseOpportunity sro;
  sro.donor_ap = tf_bss;
  sro.rpl_dbm = rpl_dbm;
  sro.psr_input_dbm = tf_psr_input_dbm;
  sro.i_ap_dbm = tf_i_ap_dbm;
  sro.window_start_ns = window_start_ns;
  sro.deadline_ns = deadline_ns;
  sro.max_tx_power_dbm = cap;
  return sro;
}

bool sr_fits_window(TimeNs now, TimeNs ppdu_ns, TimeNs sifs_ns, TimeNs ack_ns,
                    TimeNs deadline_ns) {
  return now + ppdu_ns + sifs_ns + ack_ns <= deadline_ns;
}

}  // namespace psrsim
