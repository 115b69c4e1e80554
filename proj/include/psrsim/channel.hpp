#pragma once

#include <vector>

#include "psrsim/scenario.hpp"

namespace psrsim {

class Rng;

struct ChannelConfig {
  double carrier_ghz = 5.18;
  int bandwidth_mhz = 80;
  bool fading_enabled = true;
  double los_sigma_db = 3.0;   // shadowing std dev, LOS links
  double nlos_sigma_db = 8.03; // shadowing std dev, NLOS links
};

// Large-scale state of one node pair, frozen for the duration of a drop.
// Symmetric: the same state serves both link directions.
struct LinkState {
  double d2d_m = 0.0;
  double d3d_m = 0.0;
  bool is_los = true;
  double pathloss_db = 0.0;
  double shadowing_db = 0.0;
  double fading_db = 0.0;  // 10*log10(mean |h|^2) over the antenna pairs; 0 if disabled

  double large_scale_db() const { return pathloss_db + shadowing_db; }
  // total attenuation including the static fading realization
  double loss_db() const { return pathloss_db + shadowing_db - fading_db; }
};

// TR 38.901 InH LOS probability.
double los_probability(double d2d_m);

// TR 38.901 InH-Office pathloss. Distances below 1 m are clamped to 1 m.
// The NLOS value is floored at the LOS value.
double pathloss_db(double d3d_m, double carrier_ghz, bool is_los);

class ChannelModel {
 public:
  ChannelModel(const Deployment& dep, const ChannelConfig& cfg,
               Rng& largescale_rng, Rng& fading_rng);

  const LinkState& link(int a, int b) const;

  double avg_loss_db(int a, int b) const { return link(a, b).large_scale_db(); }

  // received power including the drop's fading realization
  double rx_power_dbm(double tx_power_dbm, int tx, int rx) const {
    return tx_power_dbm - link(tx, rx).loss_db();
  }
  // fading averaged out
  double rx_power_avg_dbm(double tx_power_dbm, int tx, int rx) const {
    return tx_power_dbm - link(tx, rx).large_scale_db();
  }

  const ChannelConfig& config() const { return cfg_; }

 private:
  ChannelConfig cfg_;
  int n_ = 0;
  std::vector<LinkState> links_;  // n*n, symmetric, diagonal unused
};

}  // namespace psrsim
