#pragma once

#include <string>
#include <vector>

#include "psrsim/engine.hpp"

namespace psrsim {

// files.csv: one row per completed file.
// drop_seed,sta_id,traffic_class,arrival_ns,completed_ns,size_bytes,delay_us,throughput_mbps,via_sr
std::string files_csv(const std::vector<DropResult>& drops);

// sro_counts.csv: drop_seed,sta_id,sr_transmissions_gained
std::string sro_counts_csv(const std::vector<DropResult>& drops);

// summary.json: per-class sample counts, censoring, delay percentiles
// {50, 85, 95, 99} and mean throughput.
std::string summary_json(const SimConfig& cfg, const MetricsSummary& summary);

void write_text_file(const std::string& path, const std::string& content);

struct CdfCurve {
  std::string label;
  std::vector<double> samples;
  std::string color = "#1f77b4";
  bool dashed = false;
};

// Minimal standalone step-plot renderer; output carries no timestamps so
// re-running an experiment rewrites byte-identical files.
std::string render_cdf_svg(const std::string& title, const std::string& x_label,
                           const std::vector<CdfCurve>& curves, bool log_x);

}  // namespace psrsim
