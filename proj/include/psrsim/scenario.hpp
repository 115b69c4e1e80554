#pragma once

#include <map>
#include <vector>

namespace psrsim {

class Rng;
class ChannelModel;

enum class NodeKind { Ap, Sta };
enum class TrafficClass { None, Broadband, LowLatency };

const char* traffic_class_name(TrafficClass c);

// Indoor deployment: a 3d x d room with up to three ceiling-mounted APs on
// the centerline and STAs dropped uniformly at random on the floor.
struct ScenarioConfig {
  double inter_ap_distance_m = 20.0;  // d; room is 3d x d
  int n_aps = 3;
  double ap_height_m = 3.0;
  double sta_height_m = 1.0;
  int n_broadband_stas = 16;
  int n_lowlatency_stas = 8;
  int ap_antennas = 4;
  int sta_antennas = 1;
  double ap_max_tx_power_dbm = 24.0;
  double sta_max_tx_power_dbm = 15.0;
  double ap_noise_figure_db = 7.0;
  double sta_noise_figure_db = 9.0;
  double sensitivity_dbm = -90.0;

  double room_x_m() const { return 3.0 * inter_ap_distance_m; }
  double room_y_m() const { return inter_ap_distance_m; }
  int n_stas() const { return n_broadband_stas + n_lowlatency_stas; }
};

struct Position {
  double x = 0.0, y = 0.0, z = 0.0;
};

struct Node {
  int id = -1;
  NodeKind kind = NodeKind::Sta;
  int bss = -1;  // serving AP id; -1 until associated (APs carry their own id)
  Position pos;
  int n_antennas = 1;
  double max_tx_power_dbm = 15.0;
  double noise_figure_db = 9.0;
  double sensitivity_dbm = -90.0;
  bool psr_capable = false;
  TrafficClass traffic_class = TrafficClass::None;
};

struct Deployment {
  ScenarioConfig config;
  std::vector<Node> nodes;          // APs first (ids 0..n_aps-1), then STAs
  std::map<int, int> association;   // STA id -> AP id

  int n_aps() const { return config.n_aps; }
  int n_nodes() const { return static_cast<int>(nodes.size()); }
  bool is_ap(int id) const { return id < config.n_aps; }
  const Node& node(int id) const { return nodes[static_cast<std::size_t>(id)]; }
};

// Places APs at x = d/2, 3d/2, 5d/2 on the room centerline and draws STA
// positions uniformly over the floor. The first n_lowlatency_stas drawn
// STAs carry low-latency traffic, the rest broadband. Association is left
// unset.
Deployment deploy(const ScenarioConfig& cfg, Rng& rng);

// Associates every STA to the AP with the strongest average received signal
// (max TX power minus pathloss minus shadowing; fading averaged out). Ties
// break toward the lowest AP id.
void associate(Deployment& dep, const ChannelModel& channel);

}  // namespace psrsim
