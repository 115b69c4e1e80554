#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "psrsim/config.hpp"
#include "psrsim/traffic.hpp"
#include "psrsim/units.hpp"

namespace psrsim {

// One row per spatial-reuse transmission, kept for invariant auditing.
struct SrAudit {
  int sta_id = -1;
  int sta_bss = -1;
  int donor_ap = -1;
  TimeNs start_ns = 0;
  TimeNs end_with_ack_ns = 0;  // SR PPDU end + SIFS + ACK
  TimeNs deadline_ns = 0;
  double tx_power_dbm = 0.0;
  double psr_input_dbm = 0.0;
  double rpl_dbm = 0.0;
  double i_ap_dbm = 0.0;
  // per-20-MHz interference at the donor over the reciprocal large-scale loss
  double donor_interference_per20_dbm = 0.0;
};

struct DropResult {
  std::uint64_t seed = 0;
  int drop_index = 0;
  std::vector<FileRecord> files;          // in arrival-creation order
  std::map<int, int> sr_tx_by_sta;        // every grabber-class STA, zeros kept
  std::vector<SrAudit> sr_audits;
  std::int64_t delivered_payload_bytes = 0;
  TimeNs max_txop_span_ns = 0;
  std::int64_t n_events = 0;
  std::int64_t n_txops = 0;
  // spatial-reuse bookkeeping, for diagnosing opportunity scarcity
  std::int64_t sro_granted = 0;
  std::int64_t sro_denied_floor = 0;   // Condition 2 unsatisfiable at grant time
  std::int64_t sr_defer_cs = 0;        // energy carrier sense said busy
  std::int64_t sr_defer_sinr = 0;      // no MCS closes the link right now
  std::int64_t sr_failed = 0;          // transmitted but not received
};

std::uint64_t drop_seed(std::uint64_t master_seed, int drop_index);

// The static world of one drop: placements, channel realization and the
// resulting association, exactly as run_drop builds them.
struct DropWorld {
  Deployment deployment;
  ChannelModel channel;
};
DropWorld build_drop_world(const SimConfig& cfg, std::uint64_t seed);

// Simulates one drop: deployment, channel realization, association, traffic,
// and the full MAC/PHY/PSR event loop. Deterministic given (cfg, seed).
DropResult run_drop(const SimConfig& cfg, std::uint64_t seed, int drop_index);

// Independent drops with seeds derived from the master seed. Honors
// cfg.run.parallel_drops; results are always returned in drop order.
std::vector<DropResult> run_campaign(const SimConfig& cfg);
// Serial reference path, byte-identical to the parallel one.
std::vector<DropResult> run_campaign_serial(const SimConfig& cfg);

// Nearest-rank percentile on a copy of the samples. Throws on empty input.
double percentile(std::vector<double> samples, double p);

struct ClassMetrics {
  std::size_t arrivals = 0;
  std::size_t completed = 0;
  std::size_t censored = 0;   // pending at drop end
  std::size_t abandoned = 0;
  std::vector<double> delay_us;         // completed files only
  std::vector<double> throughput_mbps;  // completed files only
};

struct MetricsSummary {
  ClassMetrics broadband;
  ClassMetrics lowlatency;
  std::vector<int> sr_tx_counts;  // one sample per (drop, grabber STA)
  std::int64_t sr_transmissions = 0;

  const ClassMetrics& by_class(TrafficClass c) const {
    return c == TrafficClass::LowLatency ? lowlatency : broadband;
  }
  double zero_sr_fraction() const;

  static MetricsSummary build(const SimConfig& cfg,
                              const std::vector<DropResult>& drops);
};

}  // namespace psrsim
