#include "psrsim/channel.hpp"

#include <algorithm>
#include <cmath>

#include "psrsim/rng.hpp"
#include "psrsim/units.hpp"

namespace psrsim {

double los_probability(double d2d_m) {
  if (d2d_m <= 5.0) return 1.0;
  if (d2d_m <= 49.0) return std::exp(-(d2d_m - 5.0) / 70.8);
  return 0.54 * std::exp(-(d2d_m - 49.0) / 211.7);
}

double pathloss_db(double d3d_m, double carrier_ghz, bool is_los) {
  const double d = std::max(d3d_m, 1.0);  // log singularity guard
  const double los =
      32.4 + 17.3 * std::log10(d) + 20.0 * std::log10(carrier_ghz);
  if (is_los) return los;
  const double nlos =
      17.3 + 38.3 * std::log10(d) + 24.9 * std::log10(carrier_ghz);
  return std::max(los, nlos);
}

ChannelModel::ChannelModel(const Deployment& dep, const ChannelConfig& cfg,
                           Rng& largescale_rng, Rng& fading_rng)
    : cfg_(cfg), n_(dep.n_nodes()), links_(static_cast<std::size_t>(n_ * n_)) {
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      const Position& a = dep.node(i).pos;
      const Position& b = dep.node(j).pos;
      const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;

      LinkState link;
      link.d2d_m = std::hypot(dx, dy);
      link.d3d_m = std::sqrt(dx * dx + dy * dy + dz * dz);
      link.is_los = largescale_rng.uniform01() < los_probability(link.d2d_m);
      link.pathloss_db = pathloss_db(link.d3d_m, cfg.carrier_ghz, link.is_los);
      link.shadowing_db = largescale_rng.normal(
          link.is_los ? cfg.los_sigma_db : cfg.nlos_sigma_db);

      if (cfg.fading_enabled) {
        // i.i.d. unit-power complex Gaussian entries; the scalar kept is the
        // mean power over the antenna pairs, shared by both directions.
        const int n_entries = dep.node(i).n_antennas * dep.node(j).n_antennas;
        double power = 0.0;
        for (int k = 0; k < n_entries; ++k) {
          const double re = fading_rng.normal(1.0);
          const double im = fading_rng.normal(1.0);
          power += (re * re + im * im) / 2.0;
        }
        link.fading_db = linear_to_db(power / n_entries);
      }

      links_[static_cast<std::size_t>(i * n_ + j)] = link;
      links_[static_cast<std::size_t>(j * n_ + i)] = link;
    }
  }
}

const LinkState& ChannelModel::link(int a, int b) const {
  return links_[static_cast<std::size_t>(a * n_ + b)];
}

}  // namespace psrsim
