#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "psrsim/config.hpp"
#include "psrsim/engine.hpp"
#include "psrsim/report.hpp"

namespace {

using namespace psrsim;

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitSimError = 3;

struct Overrides {
  std::string config_path;
  std::string psr_mode;  // "", "on", "off"
  std::optional<double> inter_ap_distance_m;
  std::optional<double> load_mbps;
  std::optional<int> ap_antennas;
  std::optional<int> drops;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration_s;
};

SimConfig effective_config(const Overrides& o) {
  SimConfig cfg = o.config_path.empty() ? SimConfig{} : load_config(o.config_path);
  if (o.psr_mode == "on") cfg.psr.enabled = true;
  if (o.psr_mode == "off") cfg.psr.enabled = false;
  if (o.inter_ap_distance_m) cfg.scenario.inter_ap_distance_m = *o.inter_ap_distance_m;
  if (o.load_mbps) cfg.traffic.broadband_load_mbps = *o.load_mbps;
  if (o.ap_antennas) cfg.scenario.ap_antennas = *o.ap_antennas;
  if (o.drops) cfg.run.drops = *o.drops;
  if (o.seed) cfg.run.seed = *o.seed;
  if (o.duration_s) cfg.run.duration_s = *o.duration_s;
  validate_config(cfg);
  return cfg;
}

void write_campaign_outputs(const std::string& dir, const SimConfig& cfg,
                            const std::vector<DropResult>& drops) {
  const MetricsSummary summary = MetricsSummary::build(cfg, drops);
  write_text_file(dir + "/files.csv", files_csv(drops));
  write_text_file(dir + "/sro_counts.csv", sro_counts_csv(drops));
  write_text_file(dir + "/summary.json", summary_json(cfg, summary));
}

struct SweepPoint {
  std::string label;
  SimConfig cfg;
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

int run_sweep(const std::string& preset, const Overrides& base_overrides,
              const std::string& out_dir) {
  const SimConfig base = effective_config(base_overrides);

  std::vector<SweepPoint> points;
  const auto add_point = [&](const std::string& label, SimConfig cfg) {
    cfg.run = base.run;
    points.push_back({label, std::move(cfg)});
  };

  if (preset == "fig3" || preset == "fig4" || preset == "fig5") {
    for (double d : {10.0, 20.0, 30.0}) {
      for (bool psr : {false, true}) {
        if (preset == "fig4" && !psr) continue;  // SR counts need PSR on
        SimConfig cfg = base;
        cfg.scenario.inter_ap_distance_m = d;
        cfg.psr.enabled = psr;
        add_point("d" + std::to_string(static_cast<int>(d)) +
                      (psr ? "_psr_on" : "_psr_off"),
                  cfg);
      }
    }
  } else if (preset == "fig6") {
    for (double load : {5.0, 20.0, 50.0, 100.0}) {
      for (bool psr : {false, true}) {
        SimConfig cfg = base;
        cfg.traffic.broadband_load_mbps = load;
        cfg.psr.enabled = psr;
        add_point("load" + std::to_string(static_cast<int>(load)) +
                      (psr ? "_psr_on" : "_psr_off"),
                  cfg);
      }
    }
  } else if (preset == "fig7") {
    for (int ant : {1, 2, 4, 8}) {
      for (bool psr : {false, true}) {
        SimConfig cfg = base;
        cfg.scenario.ap_antennas = ant;
        cfg.psr.enabled = psr;
        add_point("ant" + std::to_string(ant) + (psr ? "_psr_on" : "_psr_off"),
                  cfg);
      }
    }
  } else {
    std::cerr << "unknown preset '" << preset << "'\n";
    return kExitConfigError;
  }

  std::vector<CdfCurve> curves;
  nlohmann::ordered_json combined;
  combined["preset"] = preset;
  int failures = 0;
  int color_idx = 0;
  for (const SweepPoint& point : points) {
    std::cout << "[" << preset << "] running " << point.label << " ("
              << point.cfg.run.drops << " drops x " << point.cfg.run.duration_s
              << " s)..." << std::endl;
    try {
      const std::vector<DropResult> drops = run_campaign(point.cfg);
      const MetricsSummary summary = MetricsSummary::build(point.cfg, drops);
      write_campaign_outputs(out_dir + "/" + point.label, point.cfg, drops);

      CdfCurve curve;
      curve.label = point.label;
      curve.dashed = !point.cfg.psr.enabled;
      curve.color = kPalette[(color_idx / (preset == "fig4" ? 1 : 2)) % 8];
      nlohmann::ordered_json pj;
      if (preset == "fig4") {
        for (int c : summary.sr_tx_counts) curve.samples.push_back(c);
        pj["zero_sr_fraction"] = summary.zero_sr_fraction();
      } else if (preset == "fig5") {
        curve.samples = summary.broadband.throughput_mbps;
        if (!curve.samples.empty()) {
          pj["median_broadband_throughput_mbps"] = percentile(curve.samples, 50.0);
        }
      } else {
        curve.samples = summary.lowlatency.delay_us;
        if (!curve.samples.empty()) {
          pj["p50_delay_us"] = percentile(curve.samples, 50.0);
          pj["p85_delay_us"] = percentile(curve.samples, 85.0);
          pj["p95_delay_us"] = percentile(curve.samples, 95.0);
        }
      }
      pj["samples"] = curve.samples.size();
      combined["points"][point.label] = pj;
      curves.push_back(std::move(curve));
      ++color_idx;
    } catch (const SimError& e) {
      std::cerr << "[" << preset << "] " << point.label
                << " failed: " << e.what() << "\n";
      combined["points"][point.label] = {{"error", e.what()}};
      ++failures;
      ++color_idx;
    }
  }

  std::string title, x_label;
  bool log_x = true;
  if (preset == "fig4") {
    title = "SR transmissions gained per low-latency STA";
    x_label = "SR transmissions per STA per drop";
    log_x = false;
  } else if (preset == "fig5") {
    title = "Uplink file throughput, broadband STAs";
    x_label = "file throughput [Mbps]";
    log_x = false;
  } else {
    title = "Uplink file delay, low-latency STAs";
    x_label = "file delay [us]";
  }
  write_text_file(out_dir + "/" + preset + ".svg",
                  render_cdf_svg(title, x_label, curves, log_x));
  write_text_file(out_dir + "/summary.json", combined.dump(2) + "\n");
  std::cout << "[" << preset << "] wrote " << out_dir << "\n";
  return failures == 0 ? kExitOk : kExitSimError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"802.11ax uplink WLAN simulator with parameterized spatial reuse"};
  app.require_subcommand(1);

  Overrides o;
  std::string out_dir = "out";
  std::string preset;

  CLI::App* simulate = app.add_subcommand("simulate", "run one campaign");
  simulate->add_option("--config", o.config_path, "configuration file");
  simulate->add_option("--psr", o.psr_mode, "on|off")
      ->check(CLI::IsMember({"on", "off"}));
  simulate->add_option("--inter-ap-distance-m", o.inter_ap_distance_m);
  simulate->add_option("--load-mbps", o.load_mbps);
  simulate->add_option("--ap-antennas", o.ap_antennas);
  simulate->add_option("--drops", o.drops);
  simulate->add_option("--seed", o.seed);
  simulate->add_option("--duration-s", o.duration_s);
  simulate->add_option("--out", out_dir, "output directory");

  CLI::App* sweep = app.add_subcommand("sweep", "run a named experiment preset");
  sweep->add_option("--preset", preset, "fig3|fig4|fig5|fig6|fig7")
      ->required()
      ->check(CLI::IsMember({"fig3", "fig4", "fig5", "fig6", "fig7"}));
  sweep->add_option("--config", o.config_path, "base configuration file");
  sweep->add_option("--drops", o.drops);
  sweep->add_option("--seed", o.seed);
  sweep->add_option("--duration-s", o.duration_s);
  sweep->add_option("--out", out_dir, "output directory");

  CLI::App* validate = app.add_subcommand("validate", "check a configuration file");
  std::string validate_path;
  validate->add_option("--config", validate_path, "configuration file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (app.got_subcommand(validate)) {
      load_config(validate_path);
      std::cout << "configuration OK\n";
      return kExitOk;
    }
    if (app.got_subcommand(simulate)) {
      const SimConfig cfg = effective_config(o);
      const std::vector<DropResult> drops = run_campaign(cfg);
      write_campaign_outputs(out_dir, cfg, drops);
      const MetricsSummary summary = MetricsSummary::build(cfg, drops);
      std::cout << "wrote " << out_dir << " ("
                << summary.lowlatency.completed + summary.broadband.completed
                << " completed files)\n";
      return kExitOk;
    }
    return run_sweep(preset, o, out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const SimError& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return kExitSimError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSimError;
  }
}
