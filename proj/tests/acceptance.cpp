// End-to-end acceptance suite. Runs the full Monte Carlo campaigns behind the
// headline results and prints one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "psrsim/engine.hpp"
#include "psrsim/mac.hpp"
#include "psrsim/phy.hpp"
#include "psrsim/report.hpp"
#include "psrsim/rng.hpp"

using namespace psrsim;

namespace {

constexpr std::uint64_t kSeed = 1;

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %-34s %s\n", pass ? "PASS" : "FAIL", id,
              name.c_str(), detail.c_str());
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

SimConfig base_config() {
  SimConfig cfg;  // defaults: d=20 m, 100 Mbps, 4 antennas, 10 drops x 2 s
  cfg.run.seed = kSeed;
  return cfg;
}

class CampaignCache {
 public:
  const std::vector<DropResult>& get(const std::string& label, const SimConfig& cfg) {
    auto it = cache_.find(label);
    if (it != cache_.end()) return it->second;
    const auto t0 = std::chrono::steady_clock::now();
    std::printf("  running campaign %-22s ...", label.c_str());
    std::fflush(stdout);
    auto drops = run_campaign(cfg);
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf(" %.1f s\n", dt);
    configs_[label] = cfg;
    return cache_.emplace(label, std::move(drops)).first->second;
  }

  MetricsSummary summary(const std::string& label) {
    return MetricsSummary::build(configs_.at(label), cache_.at(label));
  }

  const std::map<std::string, std::vector<DropResult>>& all() const { return cache_; }
  const SimConfig& config(const std::string& label) const { return configs_.at(label); }

 private:
  std::map<std::string, std::vector<DropResult>> cache_;
  std::map<std::string, SimConfig> configs_;
};

CampaignCache g_cache;

const std::vector<DropResult>& density_campaign(double d, bool psr) {
  SimConfig cfg = base_config();
  cfg.scenario.inter_ap_distance_m = d;
  cfg.psr.enabled = psr;
  return g_cache.get(fmt("d%.0f_%s", d, psr ? "psr" : "base"), cfg);
}

const std::vector<DropResult>& load_campaign(double load, bool psr) {
  if (load == 100.0) return density_campaign(20.0, psr);
  SimConfig cfg = base_config();
  cfg.traffic.broadband_load_mbps = load;
  cfg.psr.enabled = psr;
  return g_cache.get(fmt("load%.0f_%s", load, psr ? "psr" : "base"), cfg);
}

double ll_delay_percentile(const std::string& label, double p) {
  return percentile(g_cache.summary(label).lowlatency.delay_us, p);
}

// --- criteria ---------------------------------------------------------------

void criterion_1_psr_gain() {
  density_campaign(20.0, false);
  density_campaign(20.0, true);
  const double base = ll_delay_percentile("d20_base", 95.0);
  const double psr = ll_delay_percentile("d20_psr", 95.0);
  const double ratio = base / psr;
  report(1, "PSR worst-case latency gain", ratio >= 2.0,
         fmt("p95 baseline/PSR = %.1f/%.1f us, ratio %.2fx (need >= 2.0)", base,
             psr, ratio));
}

void criterion_2_load_regimes() {
  bool pass = true;
  std::string detail;
  for (double load : {5.0, 20.0}) {
    load_campaign(load, false);
    load_campaign(load, true);
    const std::string b = fmt("load%.0f_base", load);
    const std::string p = fmt("load%.0f_psr", load);
    const double ratio = ll_delay_percentile(p, 85.0) / ll_delay_percentile(b, 85.0);
    pass = pass && ratio >= 0.8 && ratio <= 1.3;
    detail += fmt("%gMbps p85 PSR/base %.2f; ", load, ratio);
  }
  const double hi =
      ll_delay_percentile("d20_base", 85.0) / ll_delay_percentile("d20_psr", 85.0);
  pass = pass && hi >= 2.0;
  detail += fmt("100Mbps p85 base/PSR %.2fx (need >= 2.0)", hi);
  report(2, "load regimes", pass, detail);
}

void criterion_3_density_trend() {
  for (double d : {10.0, 30.0}) density_campaign(d, false);
  const double d10 = ll_delay_percentile("d10_base", 95.0);
  const double d20 = ll_delay_percentile("d20_base", 95.0);
  const double d30 = ll_delay_percentile("d30_base", 95.0);
  report(3, "baseline density trend", d10 < d20 && d20 < d30,
         fmt("baseline p95 = %.1f / %.1f / %.1f us at d=10/20/30 m", d10, d20, d30));
}

void criterion_4_sro_scarcity() {
  density_campaign(10.0, true);
  const double f10 = g_cache.summary("d10_psr").zero_sr_fraction();
  const double f20 = g_cache.summary("d20_psr").zero_sr_fraction();
  report(4, "SRO scarcity when dense", f10 > f20,
         fmt("zero-SR fraction %.3f at d=10 vs %.3f at d=20", f10, f20));
}

void criterion_5_broadband_benefit() {
  // The per-file effect is sub-percent at this load, so this criterion runs
  // on a larger drop count than the delay studies to beat the Monte Carlo
  // noise floor.
  bool pass = true;
  std::string detail;
  for (double d : {10.0, 20.0, 30.0}) {
    SimConfig cfg = base_config();
    cfg.scenario.inter_ap_distance_m = d;
    cfg.run.drops = 40;
    cfg.psr.enabled = false;
    g_cache.get(fmt("d%.0f_base40", d), cfg);
    cfg.psr.enabled = true;
    g_cache.get(fmt("d%.0f_psr40", d), cfg);
    const double base = percentile(
        g_cache.summary(fmt("d%.0f_base40", d)).broadband.throughput_mbps, 50.0);
    const double psr = percentile(
        g_cache.summary(fmt("d%.0f_psr40", d)).broadband.throughput_mbps, 50.0);
    pass = pass && psr >= base;
    detail += fmt("d=%g: %.2f vs %.2f Mbps; ", d, psr, base);
  }
  report(5, "broadband side-benefit (median)", pass, detail);
}

void criterion_6_antennas_vs_psr() {
  SimConfig cfg = base_config();
  cfg.scenario.ap_antennas = 1;
  cfg.psr.enabled = true;
  g_cache.get("ant1_psr", cfg);
  cfg.scenario.ap_antennas = 8;
  cfg.psr.enabled = false;
  g_cache.get("ant8_base", cfg);
  const double p50_psr1 = ll_delay_percentile("ant1_psr", 50.0);
  const double p50_base8 = ll_delay_percentile("ant8_base", 50.0);
  const double p90_psr1 = ll_delay_percentile("ant1_psr", 90.0);
  const double p90_base8 = ll_delay_percentile("ant8_base", 90.0);
  report(6, "1-antenna PSR vs 8-antenna baseline",
         p50_psr1 <= p50_base8 && p90_psr1 <= p90_base8,
         fmt("p50 %.1f vs %.1f us (ratio %.2f); p90 %.1f vs %.1f us (ratio %.2f)",
             p50_psr1, p50_base8, p50_psr1 / p50_base8, p90_psr1, p90_base8,
             p90_psr1 / p90_base8));
}

void criterion_7_interference_budget() {
  // the inequality must hold on every SR transmission of every campaign
  bool eq3 = true;
  std::int64_t audited = 0;
  for (const auto& [label, drops] : g_cache.all()) {
    const double bw_term =
        10.0 * std::log10(g_cache.config(label).channel.bandwidth_mhz / 20.0);
    for (const DropResult& d : drops) {
      for (const SrAudit& a : d.sr_audits) {
        ++audited;
        if (a.tx_power_dbm - bw_term > a.psr_input_dbm - a.rpl_dbm + 1e-9) eq3 = false;
      }
    }
  }

  // with fading disabled the per-20-MHz power at the donor is exactly bounded
  SimConfig cfg = base_config();
  cfg.psr.enabled = true;
  cfg.channel.fading_enabled = false;
  const auto& drops = g_cache.get("d20_psr_nofade", cfg);
  std::int64_t bounded = 0;
  double worst_slack = 1e300;
  bool bound_ok = true;
  for (const DropResult& d : drops) {
    for (const SrAudit& a : d.sr_audits) {
      ++bounded;
      const double slack = a.i_ap_dbm - a.donor_interference_per20_dbm;
      worst_slack = std::min(worst_slack, slack);
      if (slack < -1e-9) bound_ok = false;
    }
  }
  report(7, "interference budget (exact)", eq3 && bound_ok && bounded > 0,
         fmt("%lld SR tx satisfy the power rule; %lld fading-off tx within "
             "I_AP (worst slack %.3g dB)",
             static_cast<long long>(audited), static_cast<long long>(bounded),
             worst_slack));
}

void criterion_8_containment_gating() {
  bool contained = true, gated = true, txop_ok = true;
  std::int64_t audits = 0;
  for (const auto& [label, drops] : g_cache.all()) {
    const bool psr_on = g_cache.config(label).psr.enabled;
    for (const DropResult& d : drops) {
      txop_ok = txop_ok && d.max_txop_span_ns <= kTxopLimitNs;
      if (!psr_on) {
        gated = gated && d.sr_audits.empty();
        for (const auto& [sta, n] : d.sr_tx_by_sta) gated = gated && n == 0;
      }
      for (const SrAudit& a : d.sr_audits) {
        ++audits;
        contained = contained && a.end_with_ack_ns <= a.deadline_ns;
        gated = gated && a.sta_bss != a.donor_ap;
      }
    }
  }
  report(8, "containment and gating (exact)", contained && gated && txop_ok,
         fmt("%lld SR tx contained; baseline/intra-BSS gated: %s; all TXOPs "
             "<= 4 ms: %s",
             static_cast<long long>(audits), gated ? "yes" : "NO",
             txop_ok ? "yes" : "NO"));
}

void criterion_9_single_link_oracle() {
  SimConfig cfg;
  cfg.scenario.inter_ap_distance_m = 3.0;  // small room keeps the link strong
  cfg.scenario.n_aps = 1;
  cfg.scenario.n_broadband_stas = 1;
  cfg.scenario.n_lowlatency_stas = 0;
  cfg.traffic.broadband_load_mbps = 2000.0;   // saturates a single STA
  cfg.traffic.broadband_file_bytes = 499'500; // 333 equal MSDUs, no remainder
  cfg.channel.fading_enabled = false;
  cfg.psr.enabled = false;
  cfg.run.drops = 3;
  cfg.run.duration_s = 2.0;

  // find a master seed whose three drops all leave >= 4 dB of SNR slack so
  // the analytic rate may ignore packet errors
  const auto drop_slack = [&](std::uint64_t dseed, double* snr_out) {
    const DropWorld world = build_drop_world(cfg, dseed);
    const double loss = world.channel.avg_loss_db(0, 1);
    const double min_useful =
        noise_floor_dbm(80, 7.0) + default_mcs_table().front().min_snr_db;
    const double target = ul_target_rssi_dbm(
        {15.0 - loss}, cfg.mac.ul_target_backoff_db, min_useful);
    const double rx = std::min(target + loss, 15.0) - loss;
    const double snr = rx + linear_to_db(zf_gain(cfg.scenario.ap_antennas, 1)) -
                       noise_floor_dbm(80, 7.0);
    *snr_out = snr;
    return snr - select_mcs(default_mcs_table(), snr).min_snr_db;
  };
  std::uint64_t master = kSeed;
  for (;; ++master) {
    bool ok = true;
    for (int k = 0; k < cfg.run.drops && ok; ++k) {
      double snr;
      ok = drop_slack(drop_seed(master, k), &snr) >= 4.0;
    }
    if (ok) break;
  }
  cfg.run.seed = master;

  const auto& drops = g_cache.get("single_link", cfg);
  bool pass = true;
  std::string detail = fmt("seed %llu; ", static_cast<unsigned long long>(master));
  for (int k = 0; k < cfg.run.drops; ++k) {
    double snr;
    drop_slack(drop_seed(master, k), &snr);
    const McsEntry& mcs = select_mcs(default_mcs_table(), snr);

    // payload per TXOP: MPDUs that pack into the symbol budget
    const std::int64_t per_sym_x12 = bits_x12_per_symbol(mcs, 80);
    const std::int64_t mpdu_bits_x12 = (1500 + kMpduHeaderBytes) * 8 * 12;
    std::int64_t mpdus = 0, cum = 0;
    while (true) {
      const std::int64_t next = cum + mpdu_bits_x12;
      if ((next + per_sym_x12 - 1) / per_sym_x12 > kMaxUlSymbols) break;
      cum = next;
      ++mpdus;
    }
    const double payload_bits = static_cast<double>(mpdus) * 1500.0 * 8.0;

    const double cycle_ns =
        static_cast<double>(kDifs) + 7.5 * static_cast<double>(kSlot) +
        static_cast<double>(kTriggerAirtimeNs) + 2.0 * static_cast<double>(kSifs) +
        static_cast<double>(kPreambleNs + kMaxUlSymbols * kSymbolDurationNs) +
        static_cast<double>(kBlockAckAirtimeNs);
    const double analytic_mbps = payload_bits / (cycle_ns / 1000.0);

    const double measured_mbps =
        static_cast<double>(drops[k].delivered_payload_bytes) * 8.0 /
        (cfg.run.duration_s * 1e6);
    const double err = measured_mbps / analytic_mbps - 1.0;
    pass = pass && std::abs(err) <= 0.02;
    detail += fmt("drop%d MCS%d %.1f vs %.1f Mbps (%+.2f%%); ", k, mcs.index,
                  measured_mbps, analytic_mbps, err * 100.0);
  }
  report(9, "single-link goodput oracle", pass, detail);
}

void criterion_10_determinism() {
  SimConfig cfg = base_config();
  cfg.psr.enabled = true;
  cfg.run.drops = 3;
  cfg.run.duration_s = 0.3;

  cfg.run.parallel_drops = false;
  const std::string a = files_csv(run_campaign(cfg));
  const std::string b = files_csv(run_campaign(cfg));
  cfg.run.parallel_drops = true;
  const std::string c = files_csv(run_campaign(cfg));
  report(10, "byte-identical reruns", a == b && a == c,
         fmt("%zu bytes; serial==serial: %s, serial==parallel: %s", a.size(),
             a == b ? "yes" : "NO", a == c ? "yes" : "NO"));
}

void criterion_11_phy_micro_oracles() {
  const double rate = data_rate_mbps(default_mcs_table()[11], 80, 1);
  const bool rate_ok = std::abs(rate - 600.5) <= 0.1;

  Rng rng(20'000);
  const McsEntry& mcs = default_mcs_table()[7];
  int failures = 0;
  const int trials = 100'000;
  for (int i = 0; i < trials; ++i) {
    if (!reception_succeeds(mcs.min_snr_db, mcs, rng)) ++failures;
  }
  const double per = static_cast<double>(failures) / trials;
  const bool per_ok = per >= 0.08 && per <= 0.12;
  report(11, "PHY micro-oracles", rate_ok && per_ok,
         fmt("MCS11 rate %.2f Mbps (need 600.5 +- 0.1); PER at threshold %.4f "
             "(need [0.08, 0.12])",
             rate, per));
}

}  // namespace

int main() {
  std::printf("acceptance suite: %d-drop campaigns, master seed %llu\n",
              base_config().run.drops, static_cast<unsigned long long>(kSeed));
  const auto t0 = std::chrono::steady_clock::now();

  criterion_1_psr_gain();
  criterion_2_load_regimes();
  criterion_3_density_trend();
  criterion_4_sro_scarcity();
  criterion_5_broadband_benefit();
  criterion_6_antennas_vs_psr();
  criterion_9_single_link_oracle();
  criterion_10_determinism();
  criterion_11_phy_micro_oracles();
  // 7 and 8 audit every campaign above, so they run last
  criterion_7_interference_budget();
  criterion_8_containment_gating();

  const double dt =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d/11 criteria passed in %.0f s\n", 11 - g_failures, dt);
  return g_failures == 0 ? 0 : 1;
}
