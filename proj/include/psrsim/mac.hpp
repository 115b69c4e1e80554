#pragma once

#include <functional>
#include <vector>

#include "psrsim/phy.hpp"
#include "psrsim/units.hpp"

namespace psrsim {

// Channel-access timing, 802.11 OFDM-band conventions (single access
// category, no EDCA).
constexpr TimeNs kSlot = 9 * kMicrosecond;
constexpr TimeNs kSifs = 16 * kMicrosecond;
constexpr TimeNs kDifs = 34 * kMicrosecond;
constexpr int kCwMin = 15;
constexpr int kCwMax = 1023;
constexpr int kRetryLimit = 7;

// Fixed control-frame airtimes at the legacy rate; assumed decodable
// whenever received at or above sensitivity.
constexpr TimeNs kTriggerAirtimeNs = 50 * kMicrosecond;
constexpr TimeNs kBlockAckAirtimeNs = 50 * kMicrosecond;
constexpr TimeNs kAckAirtimeNs = 30 * kMicrosecond;

constexpr TimeNs kTxopLimitNs = 4 * kMillisecond;

// Energy-detect carrier-sense threshold.
constexpr double kEnergyDetectDbm = -62.0;

// UL_Target_RSSI is clamped to keep the power-control arithmetic meaningful.
constexpr double kUlTargetRssiMinDbm = -90.0;
constexpr double kUlTargetRssiMaxDbm = -40.0;

struct MacConfig {
  // Headroom between the weakest scheduled STA's reachable RSSI and the
  // requested UL target. Keeps triggered STAs below their maximum transmit
  // power instead of pinning the cell-edge STA at full power every TXOP.
  double ul_target_backoff_db = 12.0;
};

// Data symbols that fit in the UL MU PPDU of a maximum-length TXOP:
// TF + SIFS + (preamble + symbols) + SIFS + BlockAck <= 4 ms.
constexpr int kMaxUlSymbols = static_cast<int>(
    (kTxopLimitNs - kTriggerAirtimeNs - 2 * kSifs - kBlockAckAirtimeNs -
     kPreambleNs) / kSymbolDurationNs);

int next_cw_after_failure(int cw);

// Carrier sense: busy when aggregate received energy reaches -62 dBm, when
// the NAV is still running, or when a decodable preamble marked an ongoing
// frame at its start.
bool medium_busy(double aggregate_energy_mw, int detected_preambles,
                 TimeNs nav_expiry_ns, TimeNs now_ns);

// Receive-power target for a triggered uplink: the weakest scheduled STA's
// reachable level minus the configured backoff, clamped to [-90, -40] dBm.
// The backoff is never allowed to push the target below min_useful_dbm (the
// level at which the weakest link still closes); links that cannot even
// reach that level get no headroom and transmit at full power.
double ul_target_rssi_dbm(const std::vector<double>& reachable_rssi_dbm,
                          double backoff_db, double min_useful_dbm);

// Inverse power control toward the target, capped at the hardware maximum.
double ul_tx_power_dbm(double target_rssi_dbm, double avg_loss_db,
                       double max_power_dbm);

// Picks up to `limit` members with pending data, scanning circularly from
// *cursor; advances *cursor past the last pick.
std::vector<int> pick_round_robin(const std::vector<int>& members,
                                  std::size_t& cursor,
                                  const std::function<bool(int)>& has_data,
                                  std::size_t limit);

struct ScheduledSta {
  int sta_id = -1;
  int stream_index = 0;
  int mcs_index = 0;
  double tx_power_dbm = 0.0;
};

// UL-MU solicitation. psr_input_dbm is meaningful only when psr_allowed.
struct TriggerFrame {
  int donor_ap = -1;
  int bss = -1;
  std::vector<ScheduledSta> scheduled;
  TimeNs ul_duration_ns = 0;
  int ul_symbols = 0;
  double ul_target_rssi_dbm = 0.0;
  bool psr_allowed = false;
  double psr_input_dbm = 0.0;
  double i_ap_dbm = 0.0;
  double tx_power_dbm = 0.0;
};

}  // namespace psrsim
