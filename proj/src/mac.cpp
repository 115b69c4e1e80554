#include "psrsim/mac.hpp"

#include <algorithm>

#include "psrsim/units.hpp"

namespace psrsim {

int next_cw_after_failure(int cw) {
  return std::min(2 * (cw + 1) - 1, kCwMax);
}

bool medium_busy(double aggregate_energy_mw, int detected_preambles,
                 TimeNs nav_expiry_ns, TimeNs now_ns) {
  return aggregate_energy_mw >= dbm_to_mw(kEnergyDetectDbm) ||
         nav_expiry_ns > now_ns || detected_preambles > 0;
}

double ul_target_rssi_dbm(const std::vector<double>& reachable_rssi_dbm,
                          double backoff_db, double min_useful_dbm) {
  double reach = 1e300;
  for (double r : reachable_rssi_dbm) reach = std::min(reach, r);
  const double target =
      std::max(reach - backoff_db, std::min(reach, min_useful_dbm));
  return std::clamp(target, kUlTargetRssiMinDbm, kUlTargetRssiMaxDbm);
}

double ul_tx_power_dbm(double target_rssi_dbm, double avg_loss_db,
                       double max_power_dbm) {
  return std::min(target_rssi_dbm + avg_loss_db, max_power_dbm);
}

std::vector<int> pick_round_robin(const std::vector<int>& members,
                                  std::size_t& cursor,
                                  const std::function<bool(int)>& has_data,
                                  std::size_t limit) {
  std::vector<int> picked;
  if (members.empty() || limit == 0) return picked;
  const std::size_t n = members.size();
  std::size_t last = cursor;
  for (std::size_t step = 0; step < n && picked.size() < limit; ++step) {
    const std::size_t idx = (cursor + step) % n;
    if (has_data(members[idx])) {
      picked.push_back(members[idx]);
      last = idx + 1;
    }
  }
  if (!picked.empty()) cursor = last % n;
  return picked;
}

}  // namespace psrsim
