#include "psrsim/scenario.hpp"

#include <stdexcept>

#include "psrsim/channel.hpp"
#include "psrsim/rng.hpp"

namespace psrsim {

const char* traffic_class_name(TrafficClass c) {
  switch (c) {
    case TrafficClass::Broadband: return "broadband";
    case TrafficClass::LowLatency: return "low-latency";
    default: return "none";
  }
}

Deployment deploy(const ScenarioConfig& cfg, Rng& rng) {
  if (cfg.inter_ap_distance_m <= 0.0) {
    throw std::invalid_argument("inter_ap_distance_m must be positive");
  }
  Deployment dep;
  dep.config = cfg;
  dep.nodes.reserve(static_cast<std::size_t>(cfg.n_aps + cfg.n_stas()));

  const double d = cfg.inter_ap_distance_m;
  for (int i = 0; i < cfg.n_aps; ++i) {
    Node ap;
    ap.id = i;
    ap.kind = NodeKind::Ap;
    ap.bss = i;
    ap.pos = {(2 * i + 1) * d / 2.0, d / 2.0, cfg.ap_height_m};
    ap.n_antennas = cfg.ap_antennas;
    ap.max_tx_power_dbm = cfg.ap_max_tx_power_dbm;
    ap.noise_figure_db = cfg.ap_noise_figure_db;
    ap.sensitivity_dbm = cfg.sensitivity_dbm;
    ap.psr_capable = true;
    dep.nodes.push_back(ap);
  }

  // The first n_lowlatency_stas drawn positions carry low-latency traffic;
  // class assignment is independent of location.
  for (int j = 0; j < cfg.n_stas(); ++j) {
    Node sta;
    sta.id = cfg.n_aps + j;
    sta.kind = NodeKind::Sta;
    sta.pos = {cfg.room_x_m() * rng.uniform01_open(),
               cfg.room_y_m() * rng.uniform01_open(), cfg.sta_height_m};
    sta.n_antennas = cfg.sta_antennas;
    sta.max_tx_power_dbm = cfg.sta_max_tx_power_dbm;
    sta.noise_figure_db = cfg.sta_noise_figure_db;
    sta.sensitivity_dbm = cfg.sensitivity_dbm;
    sta.psr_capable = true;
    sta.traffic_class = j < cfg.n_lowlatency_stas ? TrafficClass::LowLatency
                                                  : TrafficClass::Broadband;
    dep.nodes.push_back(sta);
  }
  return dep;
}

void associate(Deployment& dep, const ChannelModel& channel) {
  dep.association.clear();
  for (int id = dep.n_aps(); id < dep.n_nodes(); ++id) {
    int best_ap = 0;
    double best_rss = -1e300;
    for (int ap = 0; ap < dep.n_aps(); ++ap) {
      const double rss =
          channel.rx_power_avg_dbm(dep.node(ap).max_tx_power_dbm, ap, id);
      if (rss > best_rss) {  // ties keep the lowest AP id
        best_rss = rss;
        best_ap = ap;
      }
    }
    dep.association[id] = best_ap;
    dep.nodes[static_cast<std::size_t>(id)].bss = best_ap;
  }
}

}  // namespace psrsim
