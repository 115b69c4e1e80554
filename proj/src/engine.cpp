#include "psrsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "psrsim/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace psrsim {

std::uint64_t drop_seed(std::uint64_t master_seed, int drop_index) {
  return derive_seed(master_seed, 0xD50Bull + static_cast<std::uint64_t>(drop_index));
}

std::vector<DropResult> run_campaign_serial(const SimConfig& cfg) {
  std::vector<DropResult> out(static_cast<std::size_t>(cfg.run.drops));
  for (int i = 0; i < cfg.run.drops; ++i) {
    out[static_cast<std::size_t>(i)] = run_drop(cfg, drop_seed(cfg.run.seed, i), i);
  }
  return out;
}

std::vector<DropResult> run_campaign(const SimConfig& cfg) {
  if (!cfg.run.parallel_drops) return run_campaign_serial(cfg);
  const int n = cfg.run.drops;
  std::vector<DropResult> out(static_cast<std::size_t>(n));
  std::exception_ptr error;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = run_drop(cfg, drop_seed(cfg.run.seed, i), i);
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

double percentile(std::vector<double> samples, double p) {
  if (samples.empty()) throw std::invalid_argument("percentile of empty sample set");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  std::size_t rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n));
  rank = std::clamp<std::size_t>(rank, 1, samples.size());
  return samples[rank - 1];
}

double MetricsSummary::zero_sr_fraction() const {
  if (sr_tx_counts.empty()) return 0.0;
  const auto zeros = std::count(sr_tx_counts.begin(), sr_tx_counts.end(), 0);
  return static_cast<double>(zeros) / static_cast<double>(sr_tx_counts.size());
}

MetricsSummary MetricsSummary::build(const SimConfig& cfg,
                                     const std::vector<DropResult>& drops) {
  MetricsSummary s;
  const TimeNs warmup = cfg.run.warmup_ns();
  for (const DropResult& drop : drops) {
    for (const FileRecord& f : drop.files) {
      if (f.arrival_ns < warmup) continue;
      ClassMetrics& cm = f.traffic_class == TrafficClass::LowLatency
                             ? s.lowlatency
                             : s.broadband;
      cm.arrivals++;
      if (f.completed()) {
        cm.completed++;
        cm.delay_us.push_back(f.delay_us());
        cm.throughput_mbps.push_back(f.throughput_mbps());
      } else if (f.abandoned) {
        cm.abandoned++;
      } else {
        cm.censored++;
      }
    }
    for (const auto& [sta, count] : drop.sr_tx_by_sta) {
      s.sr_tx_counts.push_back(count);
      s.sr_transmissions += count;
    }
  }
  return s;
}

}  // namespace psrsim
