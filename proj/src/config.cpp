#include "psrsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace psrsim {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid numeric value for '" + key + "': " + value);
  }
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer value for '" + key + "': " + value);
  }
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid unsigned value for '" + key + "': " + value);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "on" || value == "1") return true;
  if (value == "false" || value == "off" || value == "0") return false;
  throw ConfigError("invalid boolean value for '" + key + "': " + value);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

void apply_key(SimConfig& cfg, const std::string& key, const std::string& value) {
  auto& sc = cfg.scenario;
  auto& ch = cfg.channel;
  auto& ps = cfg.psr;
  auto& tr = cfg.traffic;
  auto& rn = cfg.run;

  if (key == "scenario.inter_ap_distance_m") sc.inter_ap_distance_m = parse_double(key, value);
  else if (key == "scenario.n_aps") sc.n_aps = static_cast<int>(parse_int(key, value));
  else if (key == "scenario.ap_height_m") sc.ap_height_m = parse_double(key, value);
  else if (key == "scenario.sta_height_m") sc.sta_height_m = parse_double(key, value);
  else if (key == "scenario.n_broadband_stas") sc.n_broadband_stas = static_cast<int>(parse_int(key, value));
  else if (key == "scenario.n_lowlatency_stas") sc.n_lowlatency_stas = static_cast<int>(parse_int(key, value));
  else if (key == "scenario.ap_antennas") sc.ap_antennas = static_cast<int>(parse_int(key, value));
  else if (key == "scenario.sta_antennas") sc.sta_antennas = static_cast<int>(parse_int(key, value));
  else if (key == "scenario.ap_max_tx_power_dbm") sc.ap_max_tx_power_dbm = parse_double(key, value);
  else if (key == "scenario.sta_max_tx_power_dbm") sc.sta_max_tx_power_dbm = parse_double(key, value);
  else if (key == "scenario.ap_noise_figure_db") sc.ap_noise_figure_db = parse_double(key, value);
  else if (key == "scenario.sta_noise_figure_db") sc.sta_noise_figure_db = parse_double(key, value);
  else if (key == "scenario.sensitivity_dbm") sc.sensitivity_dbm = parse_double(key, value);
  else if (key == "channel.carrier_ghz") ch.carrier_ghz = parse_double(key, value);
  else if (key == "channel.bandwidth_mhz") ch.bandwidth_mhz = static_cast<int>(parse_int(key, value));
  else if (key == "channel.fading_enabled") ch.fading_enabled = parse_bool(key, value);
  else if (key == "channel.los_sigma_db") ch.los_sigma_db = parse_double(key, value);
  else if (key == "channel.nlos_sigma_db") ch.nlos_sigma_db = parse_double(key, value);
  else if (key == "phy.mcs_min_snr_db") {
    cfg.mcs_min_snr_db.clear();
    for (const std::string& item : split(value, ',')) {
      cfg.mcs_min_snr_db.push_back(parse_double(key, item));
    }
  } else if (key == "mac.ul_target_backoff_db") {
    cfg.mac.ul_target_backoff_db = parse_double(key, value);
  } else if (key == "psr.enabled") ps.enabled = parse_bool(key, value);
  else if (key == "psr.safety_margin_db") ps.safety_margin_db = parse_double(key, value);
  else if (key == "psr.grabber_classes") {
    ps.grab_lowlatency = false;
    ps.grab_broadband = false;
    for (const std::string& item : split(value, ',')) {
      if (item == "low-latency") ps.grab_lowlatency = true;
      else if (item == "broadband") ps.grab_broadband = true;
      else throw ConfigError("unknown traffic class in 'psr.grabber_classes': " + item);
    }
  } else if (key == "traffic.broadband_load_mbps") tr.broadband_load_mbps = parse_double(key, value);
  else if (key == "traffic.broadband_file_bytes") tr.broadband_file_bytes = parse_int(key, value);
  else if (key == "traffic.lowlatency_file_bytes") tr.lowlatency_file_bytes = parse_int(key, value);
  else if (key == "traffic.lowlatency_period_ms") {
    tr.lowlatency_period_ns = static_cast<TimeNs>(
        parse_double(key, value) * static_cast<double>(kMillisecond));
  } else if (key == "sim.drops") rn.drops = static_cast<int>(parse_int(key, value));
  else if (key == "sim.duration_s") rn.duration_s = parse_double(key, value);
  else if (key == "sim.seed") rn.seed = parse_uint(key, value);
  else if (key == "sim.warmup_ms") rn.warmup_ms = parse_double(key, value);
  else if (key == "sim.parallel_drops") rn.parallel_drops = parse_bool(key, value);
  else throw ConfigError("unknown configuration key '" + key + "'");
}

}  // namespace

SimConfig parse_config(const std::string& text) {
  SimConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value', got '" + line + "'");
    }
    apply_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  validate_config(cfg);
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate_config(const SimConfig& cfg) {
  const auto& sc = cfg.scenario;
  if (sc.inter_ap_distance_m <= 0.0)
    throw ConfigError("'scenario.inter_ap_distance_m' must be positive");
  if (sc.n_aps < 1 || sc.n_aps > 3)
    throw ConfigError("'scenario.n_aps' must be in [1, 3] (room geometry is 3d x d)");
  if (sc.ap_height_m <= 0.0 || sc.sta_height_m <= 0.0)
    throw ConfigError("node heights must be positive");
  if (sc.n_broadband_stas < 0 || sc.n_lowlatency_stas < 0)
    throw ConfigError("STA counts must be non-negative");
  if (sc.ap_antennas < 1)
    throw ConfigError("'scenario.ap_antennas' must be at least 1");
  if (sc.sta_antennas < 1)
    throw ConfigError("'scenario.sta_antennas' must be at least 1");

  const auto& ch = cfg.channel;
  if (ch.carrier_ghz <= 0.0)
    throw ConfigError("'channel.carrier_ghz' must be positive");
  if (ch.bandwidth_mhz != 20 && ch.bandwidth_mhz != 40 && ch.bandwidth_mhz != 80)
    throw ConfigError("'channel.bandwidth_mhz' must be 20, 40 or 80");
  if (ch.los_sigma_db < 0.0 || ch.nlos_sigma_db < 0.0)
    throw ConfigError("shadowing sigmas must be non-negative");

  if (cfg.mac.ul_target_backoff_db < 0.0 || cfg.mac.ul_target_backoff_db > 40.0)
    throw ConfigError("'mac.ul_target_backoff_db' must be in [0, 40]");

  const auto& ps = cfg.psr;
  if (ps.safety_margin_db < 0.0 || ps.safety_margin_db > 5.0)
    throw ConfigError("'psr.safety_margin_db' must be in [0, 5]");

  const auto& tr = cfg.traffic;
  if (tr.broadband_load_mbps < 0.0)
    throw ConfigError("'traffic.broadband_load_mbps' must be non-negative");
  if (tr.broadband_file_bytes <= 0 || tr.lowlatency_file_bytes <= 0)
    throw ConfigError("file sizes must be positive");
  if (tr.lowlatency_period_ns <= 0)
    throw ConfigError("'traffic.lowlatency_period_ms' must be positive");

  const auto& rn = cfg.run;
  if (rn.drops < 1) throw ConfigError("'sim.drops' must be at least 1");
  if (rn.duration_s <= 0.0) throw ConfigError("'sim.duration_s' must be positive");
  if (rn.warmup_ms < 0.0) throw ConfigError("'sim.warmup_ms' must be non-negative");

  if (!cfg.mcs_min_snr_db.empty()) {
    if (cfg.mcs_min_snr_db.size() != 12)
      throw ConfigError("'phy.mcs_min_snr_db' must list 12 values");
    for (std::size_t i = 1; i < cfg.mcs_min_snr_db.size(); ++i) {
      if (cfg.mcs_min_snr_db[i] <= cfg.mcs_min_snr_db[i - 1])
        throw ConfigError("'phy.mcs_min_snr_db' must be strictly increasing");
    }
  }
}

}  // namespace psrsim
