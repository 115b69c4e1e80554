#include "psrsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace psrsim {

namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

nlohmann::ordered_json class_json(const ClassMetrics& cm) {
  nlohmann::ordered_json j;
  j["samples"] = cm.completed;
  j["arrivals"] = cm.arrivals;
  j["censored"] = cm.censored;
  j["abandoned"] = cm.abandoned;
  nlohmann::ordered_json pct;
  for (double p : {50.0, 85.0, 95.0, 99.0}) {
    const std::string key = "p" + std::to_string(static_cast<int>(p));
    if (cm.delay_us.empty()) {
      pct[key] = nullptr;
    } else {
      pct[key] = percentile(cm.delay_us, p);
    }
  }
  j["delay_us_percentiles"] = pct;
  if (cm.throughput_mbps.empty()) {
    j["mean_throughput_mbps"] = nullptr;
  } else {
    double sum = 0.0;
    for (double t : cm.throughput_mbps) sum += t;
    j["mean_throughput_mbps"] = sum / static_cast<double>(cm.throughput_mbps.size());
  }
  return j;
}

}  // namespace

std::string files_csv(const std::vector<DropResult>& drops) {
  std::ostringstream out;
  out << "drop_seed,sta_id,traffic_class,arrival_ns,completed_ns,size_bytes,"
         "delay_us,throughput_mbps,via_sr\n";
  for (const DropResult& drop : drops) {
    for (const FileRecord& f : drop.files) {
      if (!f.completed()) continue;
      out << drop.seed << ',' << f.sta_id << ','
          << traffic_class_name(f.traffic_class) << ',' << f.arrival_ns << ','
          << f.completed_ns << ',' << f.size_bytes << ','
          << fixed(f.delay_us(), 3) << ',' << fixed(f.throughput_mbps(), 6)
          << ',' << (f.via_sr ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

std::string sro_counts_csv(const std::vector<DropResult>& drops) {
  std::ostringstream out;
  out << "drop_seed,sta_id,sr_transmissions_gained\n";
  for (const DropResult& drop : drops) {
    for (const auto& [sta, count] : drop.sr_tx_by_sta) {
      out << drop.seed << ',' << sta << ',' << count << '\n';
    }
  }
  return out.str();
}

std::string summary_json(const SimConfig& cfg, const MetricsSummary& summary) {
  nlohmann::ordered_json j;
  j["config"]["inter_ap_distance_m"] = cfg.scenario.inter_ap_distance_m;
  j["config"]["ap_antennas"] = cfg.scenario.ap_antennas;
  j["config"]["broadband_load_mbps"] = cfg.traffic.broadband_load_mbps;
  j["config"]["psr_enabled"] = cfg.psr.enabled;
  j["config"]["drops"] = cfg.run.drops;
  j["config"]["duration_s"] = cfg.run.duration_s;
  j["config"]["seed"] = cfg.run.seed;
  j["classes"]["low-latency"] = class_json(summary.lowlatency);
  j["classes"]["broadband"] = class_json(summary.broadband);
  j["sr"]["transmissions"] = summary.sr_transmissions;
  j["sr"]["sta_drop_samples"] = summary.sr_tx_counts.size();
  j["sr"]["zero_sr_fraction"] = summary.zero_sr_fraction();
  return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string render_cdf_svg(const std::string& title, const std::string& x_label,
                           const std::vector<CdfCurve>& curves, bool log_x) {
  constexpr double kW = 760, kH = 500;
  constexpr double kL = 80, kR = 30, kT = 50, kB = 65;
  const double plot_w = kW - kL - kR;
  const double plot_h = kH - kT - kB;

  double xmin = 1e300, xmax = -1e300;
  for (const CdfCurve& c : curves) {
    for (double v : c.samples) {
      xmin = std::min(xmin, v);
      xmax = std::max(xmax, v);
    }
  }
  if (xmin > xmax) {
    xmin = 1.0;
    xmax = 10.0;
  }
  if (log_x) {
    xmin = std::max(xmin, 1e-3);
    xmax = std::max(xmax, xmin * 10.0);
  } else if (xmax <= xmin) {
    xmax = xmin + 1.0;
  }

  const auto x_of = [&](double v) {
    if (log_x) {
      const double t = (std::log10(v) - std::log10(xmin)) /
                       (std::log10(xmax) - std::log10(xmin));
      return kL + t * plot_w;
    }
    return kL + (v - xmin) / (xmax - xmin) * plot_w;
  };
  const auto y_of = [&](double cdf) { return kT + (1.0 - cdf) * plot_h; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
    << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << ' ' << kH
    << "\">\n";
  s << "<rect width=\"" << kW << "\" height=\"" << kH
    << "\" fill=\"white\"/>\n";
  s << "<text x=\"" << kW / 2 << "\" y=\"28\" text-anchor=\"middle\" "
       "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

  // y grid
  for (int i = 0; i <= 10; ++i) {
    const double cdf = i / 10.0;
    const double y = y_of(cdf);
    s << "<line x1=\"" << kL << "\" y1=\"" << fixed(y, 1) << "\" x2=\""
      << kL + plot_w << "\" y2=\"" << fixed(y, 1)
      << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    s << "<text x=\"" << kL - 8 << "\" y=\"" << fixed(y + 4, 1)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << fixed(cdf, 1) << "</text>\n";
  }
  // x grid
  if (log_x) {
    const int d0 = static_cast<int>(std::floor(std::log10(xmin)));
    const int d1 = static_cast<int>(std::ceil(std::log10(xmax)));
    for (int d = d0; d <= d1; ++d) {
      const double v = std::pow(10.0, d);
      if (v < xmin || v > xmax) continue;
      const double x = x_of(v);
      s << "<line x1=\"" << fixed(x, 1) << "\" y1=\"" << kT << "\" x2=\""
        << fixed(x, 1) << "\" y2=\"" << kT + plot_h
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
      s << "<text x=\"" << fixed(x, 1) << "\" y=\"" << kT + plot_h + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">1e" << d << "</text>\n";
    }
  } else {
    for (int i = 0; i <= 10; ++i) {
      const double v = xmin + (xmax - xmin) * i / 10.0;
      const double x = x_of(v);
      s << "<line x1=\"" << fixed(x, 1) << "\" y1=\"" << kT << "\" x2=\""
        << fixed(x, 1) << "\" y2=\"" << kT + plot_h
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
      s << "<text x=\"" << fixed(x, 1) << "\" y=\"" << kT + plot_h + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">" << fixed(v, 1) << "</text>\n";
    }
  }
  s << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << plot_w
    << "\" height=\"" << plot_h
    << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  s << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 16
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
    << x_label << "</text>\n";
  s << "<text x=\"20\" y=\"" << kT + plot_h / 2
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
       "transform=\"rotate(-90 20 " << kT + plot_h / 2 << ")\">CDF</text>\n";

  // curves; long sample sets are thinned to quantile-spaced steps that keep
  // the exact CDF heights, so reruns stay byte-identical and files small
  constexpr std::size_t kMaxSteps = 800;
  double legend_y = kT + 16;
  for (const CdfCurve& c : curves) {
    if (!c.samples.empty()) {
      std::vector<double> sorted = c.samples;
      std::sort(sorted.begin(), sorted.end());
      const std::size_t n = sorted.size();
      std::vector<std::size_t> idx;
      if (n <= kMaxSteps) {
        idx.resize(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
      } else {
        idx.reserve(kMaxSteps);
        for (std::size_t k = 0; k < kMaxSteps; ++k) {
          idx.push_back(k * (n - 1) / (kMaxSteps - 1));
        }
      }
      std::ostringstream pts;
      pts << fixed(x_of(std::max(sorted.front(), log_x ? xmin : sorted.front())), 2)
          << ',' << fixed(y_of(0.0), 2) << ' ';
      double prev_cdf = 0.0;
      for (std::size_t i : idx) {
        const double x = x_of(log_x ? std::max(sorted[i], xmin) : sorted[i]);
        pts << fixed(x, 2) << ',' << fixed(y_of(prev_cdf), 2) << ' ';
        prev_cdf = static_cast<double>(i + 1) / n;
        pts << fixed(x, 2) << ',' << fixed(y_of(prev_cdf), 2) << ' ';
      }
      s << "<polyline fill=\"none\" stroke=\"" << c.color
        << "\" stroke-width=\"1.8\""
        << (c.dashed ? " stroke-dasharray=\"7,4\"" : "") << " points=\""
        << pts.str() << "\"/>\n";
    }
    // legend entry
    s << "<line x1=\"" << kL + 14 << "\" y1=\"" << fixed(legend_y - 4, 1)
      << "\" x2=\"" << kL + 46 << "\" y2=\"" << fixed(legend_y - 4, 1)
      << "\" stroke=\"" << c.color << "\" stroke-width=\"2\""
      << (c.dashed ? " stroke-dasharray=\"7,4\"" : "") << "/>\n";
    s << "<text x=\"" << kL + 52 << "\" y=\"" << fixed(legend_y, 1)
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << c.label
      << "</text>\n";
    legend_y += 17;
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace psrsim
