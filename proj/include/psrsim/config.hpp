#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "psrsim/channel.hpp"
#include "psrsim/mac.hpp"
#include "psrsim/psr.hpp"
#include "psrsim/scenario.hpp"
#include "psrsim/traffic.hpp"

namespace psrsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when the simulator reaches an internal inconsistency (bug trap).
struct SimError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  int drops = 10;
  double duration_s = 2.0;
  std::uint64_t seed = 1;
  double warmup_ms = 0.0;       // arrivals before this are excluded from metrics
  bool parallel_drops = true;   // OpenMP over drops; serial path kept as reference

  TimeNs duration_ns() const {
    return static_cast<TimeNs>(duration_s * static_cast<double>(kSecond));
  }
  TimeNs warmup_ns() const {
    return static_cast<TimeNs>(warmup_ms * static_cast<double>(kMillisecond));
  }
};

struct SimConfig {
  ScenarioConfig scenario;
  ChannelConfig channel;
  MacConfig mac;
  PsrConfig psr;
  TrafficConfig traffic;
  RunConfig run;
  // empty: use the default MCS thresholds; otherwise 12 increasing values
  std::vector<double> mcs_min_snr_db;
};

// Parses flat `section.key = value` text. Unknown keys and out-of-range
// values raise ConfigError naming the key. An empty file yields defaults.
SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::string& path);
void validate_config(const SimConfig& cfg);

}  // namespace psrsim
