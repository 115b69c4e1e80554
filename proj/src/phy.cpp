#include "psrsim/phy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "psrsim/rng.hpp"

namespace psrsim {

namespace {

std::vector<McsEntry> make_default_table() {
  // modulation bits, code rate (x12 kept exact), min SNR for <=10% PER
  struct Row { int bits; int rate12; double min_snr; };
  constexpr Row rows[12] = {
      {1, 6, 2.0},  {2, 6, 5.0},  {2, 9, 8.0},   {4, 6, 11.0},
      {4, 9, 15.0}, {6, 8, 18.0}, {6, 9, 20.0},  {6, 10, 25.0},
      {8, 9, 29.0}, {8, 10, 31.0}, {10, 9, 34.0}, {10, 10, 36.0},
  };
  std::vector<McsEntry> table;
  table.reserve(12);
  for (int i = 0; i < 12; ++i) {
    McsEntry e;
    e.index = i;
    e.bits_per_subcarrier = rows[i].bits;
    e.code_rate_x12 = rows[i].rate12;
    e.code_rate = rows[i].rate12 / 12.0;
    e.min_snr_db = rows[i].min_snr;
    table.push_back(e);
  }
  return table;
}

}  // namespace

const std::vector<McsEntry>& default_mcs_table() {
  static const std::vector<McsEntry> table = make_default_table();
  return table;
}

std::vector<McsEntry> mcs_table_with_min_snr(
    const std::vector<double>& min_snr_db) {
  std::vector<McsEntry> table = default_mcs_table();
  if (min_snr_db.size() != table.size()) {
    throw std::invalid_argument("MCS threshold override needs 12 values");
  }
  for (std::size_t i = 0; i < table.size(); ++i) {
    table[i].min_snr_db = min_snr_db[i];
  }
  return table;
}

int data_subcarriers(int bandwidth_mhz) {
  switch (bandwidth_mhz) {
    case 20: return 234;
    case 40: return 468;
    case 80: return 980;
    default: throw std::invalid_argument("bandwidth must be 20, 40 or 80 MHz");
  }
}

std::int64_t bits_x12_per_symbol(const McsEntry& mcs, int bandwidth_mhz) {
  return static_cast<std::int64_t>(data_subcarriers(bandwidth_mhz)) *
         mcs.bits_per_subcarrier * mcs.code_rate_x12;
}

double bits_per_symbol(const McsEntry& mcs, int bandwidth_mhz) {
  return static_cast<double>(bits_x12_per_symbol(mcs, bandwidth_mhz)) / 12.0;
}

double data_rate_mbps(const McsEntry& mcs, int bandwidth_mhz, int n_streams) {
  const double symbol_us =
      static_cast<double>(kSymbolDurationNs) / static_cast<double>(kMicrosecond);
  return n_streams * bits_per_symbol(mcs, bandwidth_mhz) / symbol_us;
}

TimeNs ppdu_duration_ns(std::int64_t payload_bytes, const McsEntry& mcs,
                        int bandwidth_mhz, int n_streams) {
  if (payload_bytes <= 0) return kPreambleNs;
  const std::int64_t bits_x12 = payload_bytes * 8 * 12;
  const std::int64_t per_symbol_x12 =
      bits_x12_per_symbol(mcs, bandwidth_mhz) * n_streams;
  const std::int64_t symbols = (bits_x12 + per_symbol_x12 - 1) / per_symbol_x12;
  return kPreambleNs + symbols * kSymbolDurationNs;
}

double noise_floor_dbm(int bandwidth_mhz, double noise_figure_db) {
  return -174.0 + 10.0 * std::log10(bandwidth_mhz * 1e6) + noise_figure_db;
}

double zf_gain(int n_ap_antennas, int n_streams) {
  return static_cast<double>(n_ap_antennas - n_streams + 1);
}

double sinr_db(double desired_dbm, double zf_gain_linear, double noise_mw,
               double interference_mw) {
  return desired_dbm + linear_to_db(zf_gain_linear) -
         mw_to_dbm(noise_mw + interference_mw);
}

double zf_receive_sinr_db(double desired_dbm, int n_antennas, int k_streams,
                          double noise_mw, std::vector<double>& interferers_mw) {
  std::sort(interferers_mw.begin(), interferers_mw.end(), std::greater<>());
  double residual = noise_mw;
  for (double i : interferers_mw) residual += i;

  const int spare = std::min(n_antennas - k_streams,
                             static_cast<int>(interferers_mw.size()));
  double best = -1e300;
  for (int cancelled = 0;; ++cancelled) {
    const double gain = zf_gain(n_antennas, k_streams + cancelled);
    if (gain >= 1.0) {
      best = std::max(best,
                      desired_dbm + linear_to_db(gain) - mw_to_dbm(residual));
    }
    if (cancelled >= spare) break;
    residual -= interferers_mw[static_cast<std::size_t>(cancelled)];
  }
  return best;
}

const McsEntry& select_mcs(const std::vector<McsEntry>& table, double sinr_db) {
  const McsEntry* best = &table.front();
  for (const McsEntry& e : table) {
    if (e.min_snr_db <= sinr_db) best = &e;
  }
  return *best;
}

double packet_error_rate(double sinr_db, double min_snr_db) {
  if (sinr_db <= min_snr_db - 3.0) return 1.0;
  if (sinr_db <= min_snr_db) {
    return 0.10 + 0.90 * (min_snr_db - sinr_db) / 3.0;
  }
  return 0.10 * std::exp(-(sinr_db - min_snr_db));
}

bool reception_succeeds(double sinr_db, const McsEntry& mcs, Rng& rng) {
  return !rng.bernoulli(packet_error_rate(sinr_db, mcs.min_snr_db));
}

}  // namespace psrsim
