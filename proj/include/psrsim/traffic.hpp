#pragma once

#include <cstdint>
#include <vector>

#include "psrsim/scenario.hpp"
#include "psrsim/units.hpp"

namespace psrsim {

struct TrafficConfig {
  double broadband_load_mbps = 100.0;  // aggregate offered load over all broadband STAs
  std::int64_t broadband_file_bytes = 500'000;
  std::int64_t lowlatency_file_bytes = 32;
  TimeNs lowlatency_period_ns = 10 * kMillisecond;
};

constexpr int kMsduMaxBytes = 1500;
constexpr int kMpduHeaderBytes = 40;  // transport + IP + MAC overhead per MPDU

// Splits a file into MSDUs of at most kMsduMaxBytes. Rejects empty files.
std::vector<int> segment_msdus(std::int64_t file_bytes);

// Per-STA Poisson file rate when an aggregate load is split evenly.
double per_sta_file_rate_hz(double aggregate_load_mbps, int n_stas,
                            std::int64_t file_bytes);

struct FileRecord {
  int sta_id = -1;
  TrafficClass traffic_class = TrafficClass::None;
  TimeNs arrival_ns = 0;
  TimeNs completed_ns = -1;  // -1: still pending at drop end (censored)
  std::int64_t size_bytes = 0;
  bool via_sr = false;    // at least one MPDU delivered inside an SRO
  bool abandoned = false; // an MPDU exceeded the retry limit twice

  bool completed() const { return completed_ns >= 0; }
  double delay_us() const {
    return static_cast<double>(completed_ns - arrival_ns) / 1000.0;
  }
  double throughput_mbps() const {
    return static_cast<double>(size_bytes) * 8.0 / delay_us();
  }
};

}  // namespace psrsim
