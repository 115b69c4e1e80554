#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <memory>
#include <queue>
#include <tuple>
#include <vector>

#include "psrsim/channel.hpp"
#include "psrsim/config.hpp"
#include "psrsim/engine.hpp"
#include "psrsim/mac.hpp"
#include "psrsim/phy.hpp"
#include "psrsim/psr.hpp"
#include "psrsim/rng.hpp"
#include "psrsim/scenario.hpp"
#include "psrsim/traffic.hpp"

namespace psrsim {

namespace {

enum class FrameKind : std::uint8_t { Trigger, UlData, BlockAck, SrData, Ack };

enum class Ev : std::uint8_t {
  Arrival,   // a = sta id
  Attempt,   // a = ap id, b = epoch
  TxStart,   // a = transmission id
  TxEnd,     // a = transmission id
  UlPhase,   // a = txop id
  UlDone,    // a = txop id
  TxopDone,  // a = txop id
  Reeval,    // no payload; forces a reevaluation pass
};

struct Event {
  TimeNs t = 0;
  std::uint64_t seq = 0;
  Ev kind = Ev::Reeval;
  std::int64_t a = 0;
  std::uint64_t b = 0;
};

struct EventLater {
  bool operator()(const Event& x, const Event& y) const {
    return std::tie(x.t, x.seq) > std::tie(y.t, y.seq);
  }
};

struct QueuedMpdu {
  int file = -1;
  int msdu_bytes = 0;
  int retry = 0;
  bool reinjected = false;

  std::int64_t air_bits() const {
    return static_cast<std::int64_t>(msdu_bytes + kMpduHeaderBytes) * 8;
  }
};

struct FileState {
  int sta = -1;
  TrafficClass cls = TrafficClass::None;
  TimeNs arrival = 0;
  std::int64_t bytes = 0;
  int mpdus_left = 0;
  TimeNs completed = -1;
  bool via_sr = false;
  bool abandoned = false;
};

struct MpduSlice {
  QueuedMpdu mpdu;
  TimeNs lo = 0, hi = 0;  // absolute airtime interval within the UL PPDU
};

struct Participant {
  int sta = -1;
  int mcs_index = 0;
  double tx_power_dbm = 0.0;
  std::vector<MpduSlice> slices;
};

struct Transmission {
  int tx_node = -1;
  int bss = -1;
  FrameKind kind = FrameKind::Trigger;
  double tx_power_dbm = 0.0;
  double tx_power_mw = 0.0;
  TimeNs start = 0, end = 0;
  TimeNs nav_until = 0;
  int txop = -1;
  int sr_mcs = 0;       // SrData only
  bool active = false;
  std::vector<std::uint8_t> detected_by;  // preamble observed at frame start
};

struct TxopState {
  int ap = -1;
  int tf_tid = -1;
  TriggerFrame tf;
  TimeNs tf_start = 0, ul_start = 0, ul_end = 0, end = 0;
  std::vector<Participant> participants;  // resolved when the UL phase starts
};

struct StaState {
  std::deque<QueuedMpdu> queue;
  TimeNs busy_until = 0;      // own transmissions (UL MU or SR)
  TimeNs sr_hold_until = 0;   // post-attempt SIFS + ACK hold
  bool has_sro = false;
  SpatialReuseOpportunity sro;
  QueuedMpdu sr_inflight;
  int sr_count = 0;
  // traffic
  double file_rate_hz = 0.0;  // Poisson file process (broadband)
  TimeNs period = 0;          // periodic process (low-latency)
};

struct ApState {
  std::vector<int> ll_members, bb_members;
  std::size_t ll_cursor = 0, bb_cursor = 0;
  int cw = kCwMin;
  int backoff = 0;
  bool in_txop = false;
  int current_txop = -1;
  bool contending = false;
  TimeNs contention_begin = 0;
  std::uint64_t epoch = 0;
  TimeNs attempt_time = -1;
  TimeNs anchor = 0;  // decrement start (idle start + DIFS) of the scheduled attempt
  TimeNs wake_time = -1;
};

class DropSim {
 public:
  DropSim(const SimConfig& cfg, std::uint64_t seed, int drop_index)
      : cfg_(cfg),
        seed_(seed),
        drop_index_(drop_index),
        traffic_rng_(derive_seed(seed, 3)),
        mac_rng_(derive_seed(seed, 4)),
        mcs_(cfg.mcs_min_snr_db.empty()
                 ? default_mcs_table()
                 : mcs_table_with_min_snr(cfg.mcs_min_snr_db)) {}

  DropResult run();

 private:
  // --- setup -------------------------------------------------------------
  void build_world();
  void init_traffic();

  // --- event machinery ---------------------------------------------------
  void schedule(TimeNs t, Ev kind, std::int64_t a = 0, std::uint64_t b = 0) {
    events_.push(Event{t, seq_++, kind, a, b});
  }
  void dispatch(const Event& ev);

  // --- medium ------------------------------------------------------------
  int create_transmission(int node, FrameKind kind, double power_dbm,
                          TimeNs start, TimeNs end, TimeNs nav_until,
                          int txop = -1);
  void activate(int tid);
  void deactivate(int tid);
  void recompute_medium();
  double active_energy_mw(int node) const { return energy_mw_[node]; }
  std::vector<double> active_interferers_mw(int rx_node, int exclude_bss,
                                            TimeNs still_on_at) const;
  std::vector<double> interval_interferers_mw(int rx_node, TimeNs lo, TimeNs hi,
                                              int exclude_bss) const;
  bool node_transmitting(int node) const { return tx_count_[node] > 0; }
  bool ap_tx_overlaps(int ap, TimeNs lo, TimeNs hi) const;
  int own_ul_streams(int ap_id, TimeNs lo, TimeNs hi) const;

  // --- MAC ---------------------------------------------------------------
  void reevaluate_all();
  void reevaluate_ap(int ap_id);
  void freeze_backoff(ApState& ap);
  bool ap_has_pending(int ap_id) const;
  void on_attempt(int ap_id, std::uint64_t epoch);
  void start_txop(int ap_id);
  void on_tf_end(int tid);
  void on_ul_phase(int txop_id);
  void on_ul_done(int txop_id);
  void on_txop_done(int txop_id);
  void requeue_failed(int sta, std::vector<QueuedMpdu>& failed);
  void deliver(const QueuedMpdu& m, TimeNs when, bool via_sr);
  void fail_mpdu(int sta, QueuedMpdu m, std::vector<QueuedMpdu>& failed);

  // --- PSR ---------------------------------------------------------------
  void try_sr(int sta);
  void on_sr_end(int tid);

  // helpers
  int bss_of(int node) const { return dep_.node(node).bss; }
  double loss_db(int a, int b) const { return channel_->link(a, b).loss_db(); }
  double avg_loss_db(int a, int b) const {
    return channel_->link(a, b).large_scale_db();
  }
  std::int64_t queued_air_bits(int sta) const;

  // --- members -----------------------------------------------------------
  const SimConfig& cfg_;
  std::uint64_t seed_;
  int drop_index_;
  Rng traffic_rng_;
  Rng mac_rng_;
  std::vector<McsEntry> mcs_;

  Deployment dep_;
  std::unique_ptr<ChannelModel> channel_;

  TimeNs now_ = 0;
  TimeNs end_ns_ = 0;
  std::uint64_t seq_ = 0;
  std::priority_queue<Event, std::vector<Event>, EventLater> events_;

  std::vector<Transmission> txs_;
  std::vector<TxopState> txops_;
  std::vector<int> active_;
  std::size_t scan_from_ = 0;  // transmissions before this can no longer overlap

  // per node
  std::vector<double> energy_mw_;    // aggregate received power, active frames
  std::vector<int> tx_count_;        // own active transmissions
  std::vector<bool> phys_busy_;
  std::vector<TimeNs> idle_since_;
  std::vector<TimeNs> nav_;
  std::vector<double> noise_mw_;

  std::vector<ApState> aps_;
  std::vector<StaState> stas_;  // indexed by node id (AP slots unused)
  std::vector<int> grabbers_;   // STA ids allowed to seize SROs

  std::vector<FileState> files_;
  DropResult result_;

  double ed_mw_ = 0.0;
  double sens_dbm_ = -90.0;
  int n_events_ = 0;
};

DropResult DropSim::run() {
  build_world();
  init_traffic();
  end_ns_ = cfg_.run.duration_ns();
  result_.seed = seed_;
  result_.drop_index = drop_index_;

  reevaluate_all();
  TimeNs last_t = 0;
  while (!events_.empty()) {
    const Event ev = events_.top();
    if (ev.t >= end_ns_) break;
    events_.pop();
    if (ev.t < last_t) throw SimError("event clock moved backwards");
    last_t = ev.t;
    now_ = ev.t;
    ++n_events_;
    dispatch(ev);
    reevaluate_all();
  }
  if (events_.empty()) {
    // An empty queue is only legal when there is genuinely nothing left to do.
    for (int id = dep_.n_aps(); id < dep_.n_nodes(); ++id) {
      if (!stas_[id].queue.empty()) {
        throw SimError("event queue exhausted with pending traffic");
      }
    }
  }

  for (const FileState& f : files_) {
    FileRecord rec;
    rec.sta_id = f.sta;
    rec.traffic_class = f.cls;
    rec.arrival_ns = f.arrival;
    rec.completed_ns = f.completed;
    rec.size_bytes = f.bytes;
    rec.via_sr = f.via_sr;
    rec.abandoned = f.abandoned;
    result_.files.push_back(rec);
  }
  for (int sta : grabbers_) result_.sr_tx_by_sta[sta] = stas_[sta].sr_count;
  result_.n_events = n_events_;
  return result_;
}

void DropSim::build_world() {
  DropWorld world = build_drop_world(cfg_, seed_);
  dep_ = std::move(world.deployment);
  channel_ = std::make_unique<ChannelModel>(std::move(world.channel));

  const int n = dep_.n_nodes();
  energy_mw_.assign(n, 0.0);
  tx_count_.assign(n, 0);
  phys_busy_.assign(n, false);
  idle_since_.assign(n, 0);
  nav_.assign(n, 0);
  noise_mw_.resize(n);
  for (int i = 0; i < n; ++i) {
    noise_mw_[i] = dbm_to_mw(noise_floor_dbm(cfg_.channel.bandwidth_mhz,
                                             dep_.node(i).noise_figure_db));
  }
  ed_mw_ = dbm_to_mw(kEnergyDetectDbm);
  sens_dbm_ = cfg_.scenario.sensitivity_dbm;

  aps_.assign(dep_.n_aps(), ApState{});
  stas_.assign(n, StaState{});
  for (int id = dep_.n_aps(); id < n; ++id) {
    const Node& sta = dep_.node(id);
    ApState& ap = aps_[sta.bss];
    if (sta.traffic_class == TrafficClass::LowLatency) {
      ap.ll_members.push_back(id);
    } else {
      ap.bb_members.push_back(id);
    }
    const bool grabber =
        (sta.traffic_class == TrafficClass::LowLatency && cfg_.psr.grab_lowlatency) ||
        (sta.traffic_class == TrafficClass::Broadband && cfg_.psr.grab_broadband);
    if (grabber && sta.psr_capable) grabbers_.push_back(id);
  }
  for (ApState& ap : aps_) ap.backoff = static_cast<int>(mac_rng_.uniform_int(0, ap.cw));
}

void DropSim::init_traffic() {
  for (int id = dep_.n_aps(); id < dep_.n_nodes(); ++id) {
    StaState& st = stas_[id];
    const Node& node = dep_.node(id);
    if (node.traffic_class == TrafficClass::Broadband) {
      st.file_rate_hz = per_sta_file_rate_hz(cfg_.traffic.broadband_load_mbps,
                                             cfg_.scenario.n_broadband_stas,
                                             cfg_.traffic.broadband_file_bytes);
      if (st.file_rate_hz > 0.0) {
        const double dt_s = traffic_rng_.exponential(1.0 / st.file_rate_hz);
        schedule(static_cast<TimeNs>(dt_s * kSecond), Ev::Arrival, id);
      }
    } else if (node.traffic_class == TrafficClass::LowLatency) {
      st.period = cfg_.traffic.lowlatency_period_ns;
      // independent uniform phase so periodic sources are not synchronized
      const TimeNs phase = static_cast<TimeNs>(
          traffic_rng_.uniform01() * static_cast<double>(st.period));
      schedule(phase, Ev::Arrival, id);
    }
  }
}

void DropSim::dispatch(const Event& ev) {
  switch (ev.kind) {
    case Ev::Arrival: {
      const int sta = static_cast<int>(ev.a);
      StaState& st = stas_[sta];
      const Node& node = dep_.node(sta);
      const std::int64_t bytes = node.traffic_class == TrafficClass::Broadband
                                     ? cfg_.traffic.broadband_file_bytes
                                     : cfg_.traffic.lowlatency_file_bytes;
      FileState f;
      f.sta = sta;
      f.cls = node.traffic_class;
      f.arrival = now_;
      f.bytes = bytes;
      const std::vector<int> msdus = segment_msdus(bytes);
      f.mpdus_left = static_cast<int>(msdus.size());
      const int file_idx = static_cast<int>(files_.size());
      files_.push_back(f);
      for (int msdu : msdus) st.queue.push_back(QueuedMpdu{file_idx, msdu, 0, false});

      if (node.traffic_class == TrafficClass::Broadband) {
        const double dt_s = traffic_rng_.exponential(1.0 / st.file_rate_hz);
        schedule(now_ + static_cast<TimeNs>(dt_s * kSecond), Ev::Arrival, sta);
      } else {
        schedule(now_ + st.period, Ev::Arrival, sta);
      }
      break;
    }
    case Ev::Attempt:
      on_attempt(static_cast<int>(ev.a), ev.b);
      break;
    case Ev::TxStart:
      activate(static_cast<int>(ev.a));
      break;
    case Ev::TxEnd: {
      const int tid = static_cast<int>(ev.a);
      deactivate(tid);
      const Transmission& tx = txs_[tid];
      // virtual carrier sense: nodes that observed the preamble and received
      // the frame above sensitivity decode its duration field
      for (int n = 0; n < dep_.n_nodes(); ++n) {
        if (n == tx.tx_node || !tx.detected_by[n]) continue;
        nav_[n] = std::max(nav_[n], tx.nav_until);
      }
      if (tx.kind == FrameKind::Trigger) on_tf_end(tid);
      else if (tx.kind == FrameKind::SrData) on_sr_end(tid);
      break;
    }
    case Ev::UlPhase:
      on_ul_phase(static_cast<int>(ev.a));
      break;
    case Ev::UlDone:
      on_ul_done(static_cast<int>(ev.a));
      break;
    case Ev::TxopDone:
      on_txop_done(static_cast<int>(ev.a));
      break;
    case Ev::Reeval:
      break;  // the post-dispatch reevaluation pass does the work
  }
}

// --- medium ---------------------------------------------------------------

int DropSim::create_transmission(int node, FrameKind kind, double power_dbm,
                                 TimeNs start, TimeNs end, TimeNs nav_until,
                                 int txop) {
  Transmission tx;
  tx.tx_node = node;
  tx.bss = bss_of(node);
  tx.kind = kind;
  tx.tx_power_dbm = power_dbm;
  tx.tx_power_mw = dbm_to_mw(power_dbm);
  tx.start = start;
  tx.end = end;
  tx.nav_until = nav_until;
  tx.txop = txop;
  tx.detected_by.assign(static_cast<std::size_t>(dep_.n_nodes()), 0);
  const int tid = static_cast<int>(txs_.size());
  txs_.push_back(std::move(tx));
  if (start == now_) {
    activate(tid);
  } else {
    schedule(start, Ev::TxStart, tid);
  }
  schedule(end, Ev::TxEnd, tid);
  return tid;
}

void DropSim::activate(int tid) {
  Transmission& tx = txs_[tid];
  if (node_transmitting(tx.tx_node)) {
    throw SimError("node started two overlapping transmissions");
  }
  tx.active = true;
  active_.push_back(tid);
  tx_count_[tx.tx_node]++;
  // preamble detection is only possible for nodes listening at frame start
  for (int n = 0; n < dep_.n_nodes(); ++n) {
    if (n == tx.tx_node || node_transmitting(n)) continue;
    const double rx_dbm = tx.tx_power_dbm - loss_db(tx.tx_node, n);
    if (rx_dbm >= sens_dbm_) tx.detected_by[n] = 1;
  }
  recompute_medium();
}

void DropSim::deactivate(int tid) {
  Transmission& tx = txs_[tid];
  tx.active = false;
  active_.erase(std::find(active_.begin(), active_.end(), tid));
  tx_count_[tx.tx_node]--;
  recompute_medium();
}

void DropSim::recompute_medium() {
  for (int n = 0; n < dep_.n_nodes(); ++n) {
    double energy = 0.0;
    int detect = 0;
    for (int tid : active_) {
      const Transmission& tx = txs_[tid];
      if (tx.tx_node == n) continue;
      energy += tx.tx_power_mw * dbm_to_mw(-loss_db(tx.tx_node, n));
      detect += tx.detected_by[n];
    }
    energy_mw_[n] = energy;
    const bool busy = node_transmitting(n) || medium_busy(energy, detect, 0, now_);
    if (busy != phys_busy_[n]) {
      phys_busy_[n] = busy;
      if (!busy) idle_since_[n] = now_;
    }
  }
}

std::vector<double> DropSim::active_interferers_mw(int rx_node, int exclude_bss,
                                                   TimeNs still_on_at) const {
  std::vector<double> out;
  for (int tid : active_) {
    const Transmission& tx = txs_[tid];
    if (tx.bss == exclude_bss || tx.tx_node == rx_node) continue;
    if (tx.end <= still_on_at) continue;  // gone before the predicted window
    out.push_back(tx.tx_power_mw * dbm_to_mw(-loss_db(tx.tx_node, rx_node)));
  }
  return out;
}

std::vector<double> DropSim::interval_interferers_mw(int rx_node, TimeNs lo,
                                                     TimeNs hi,
                                                     int exclude_bss) const {
  std::vector<double> out;
  for (std::size_t i = scan_from_; i < txs_.size(); ++i) {
    const Transmission& tx = txs_[i];
    if (tx.start >= hi || tx.end <= lo) continue;
    if (tx.bss == exclude_bss || tx.tx_node == rx_node) continue;
    out.push_back(tx.tx_power_mw * dbm_to_mw(-loss_db(tx.tx_node, rx_node)));
  }
  return out;
}

bool DropSim::ap_tx_overlaps(int ap, TimeNs lo, TimeNs hi) const {
  for (std::size_t i = scan_from_; i < txs_.size(); ++i) {
    const Transmission& tx = txs_[i];
    if (tx.tx_node == ap && tx.start < hi && tx.end > lo) return true;
  }
  return false;
}

int DropSim::own_ul_streams(int ap_id, TimeNs lo, TimeNs hi) const {
  int streams = 0;
  for (std::size_t i = scan_from_; i < txs_.size(); ++i) {
    const Transmission& tx = txs_[i];
    if (tx.kind != FrameKind::UlData || tx.bss != ap_id) continue;
    if (tx.start < hi && tx.end > lo) ++streams;
  }
  return streams;
}

// --- MAC --------------------------------------------------------------------

std::int64_t DropSim::queued_air_bits(int sta) const {
  std::int64_t bits = 0;
  for (const QueuedMpdu& m : stas_[sta].queue) bits += m.air_bits();
  return bits;
}

bool DropSim::ap_has_pending(int ap_id) const {
  const ApState& ap = aps_[ap_id];
  for (int s : ap.ll_members)
    if (!stas_[s].queue.empty()) return true;
  for (int s : ap.bb_members)
    if (!stas_[s].queue.empty()) return true;
  return false;
}

void DropSim::reevaluate_all() {
  for (int a = 0; a < dep_.n_aps(); ++a) reevaluate_ap(a);
  if (cfg_.psr.enabled) {
    for (int s : grabbers_) try_sr(s);
  }
}

void DropSim::freeze_backoff(ApState& ap) {
  if (ap.attempt_time < 0) return;
  // Slot-edge tie: a countdown finishing at the very instant the medium goes
  // busy still transmits; this is how same-slot collisions arise.
  if (ap.attempt_time == now_) return;
  const TimeNs elapsed = now_ - ap.anchor;
  if (elapsed > 0) {
    const int slots = static_cast<int>(
        std::min<std::int64_t>(elapsed / kSlot, ap.backoff));
    ap.backoff -= slots;
  }
  ap.attempt_time = -1;
  ap.epoch++;
}

void DropSim::reevaluate_ap(int ap_id) {
  ApState& ap = aps_[ap_id];
  if (ap.in_txop || node_transmitting(ap_id)) {
    freeze_backoff(ap);
    return;
  }
  if (!ap_has_pending(ap_id)) {
    freeze_backoff(ap);
    ap.contending = false;
    return;
  }
  if (!ap.contending) {
    ap.contending = true;
    ap.contention_begin = now_;
  }
  const bool busy =
      phys_busy_[ap_id] || medium_busy(0.0, 0, nav_[ap_id], now_);
  if (busy) {
    freeze_backoff(ap);
    if (!phys_busy_[ap_id] && nav_[ap_id] > now_ && ap.wake_time != nav_[ap_id]) {
      // nothing else will fire at NAV expiry; wake explicitly
      ap.wake_time = nav_[ap_id];
      schedule(nav_[ap_id], Ev::Reeval);
    }
    return;
  }
  const TimeNs idle_start =
      std::max({idle_since_[ap_id], nav_[ap_id], ap.contention_begin});
  const TimeNs anchor = idle_start + kDifs;
  const TimeNs attempt = anchor + static_cast<TimeNs>(ap.backoff) * kSlot;
  if (attempt == ap.attempt_time) return;  // already scheduled
  ap.epoch++;
  ap.attempt_time = attempt;
  ap.anchor = anchor;
  schedule(attempt, Ev::Attempt, ap_id, ap.epoch);
}

void DropSim::on_attempt(int ap_id, std::uint64_t epoch) {
  ApState& ap = aps_[ap_id];
  if (epoch != ap.epoch) return;  // stale: medium went busy in the meantime
  ap.attempt_time = -1;
  ap.backoff = 0;
  if (!ap_has_pending(ap_id)) {
    ap.contending = false;  // nothing to send; counter stays at zero
    return;
  }
  start_txop(ap_id);
}

void DropSim::start_txop(int ap_id) {
  ApState& ap = aps_[ap_id];
  const Node& ap_node = dep_.node(ap_id);
  const int bw = cfg_.channel.bandwidth_mhz;

  // round-robin selection with strict priority for low-latency STAs
  const auto has_data = [this](int s) { return !stas_[s].queue.empty(); };
  const std::size_t limit = static_cast<std::size_t>(ap_node.n_antennas);
  std::vector<int> sched =
      pick_round_robin(ap.ll_members, ap.ll_cursor, has_data, limit);
  const std::vector<int> bb = pick_round_robin(
      ap.bb_members, ap.bb_cursor, has_data, limit - sched.size());
  sched.insert(sched.end(), bb.begin(), bb.end());
  if (sched.empty()) throw SimError("TXOP started with no pending STA");

  const int n_streams = static_cast<int>(sched.size());
  std::vector<double> reachable;
  reachable.reserve(sched.size());
  for (int s : sched) {
    reachable.push_back(dep_.node(s).max_tx_power_dbm - avg_loss_db(s, ap_id));
  }
  // headroom only while the weakest link still closes at the lowest MCS
  const double min_useful = noise_floor_dbm(cfg_.channel.bandwidth_mhz,
                                            ap_node.noise_figure_db) +
                            mcs_.front().min_snr_db;
  const double target =
      ul_target_rssi_dbm(reachable, cfg_.mac.ul_target_backoff_db, min_useful);

  TriggerFrame tf;
  tf.donor_ap = ap_id;
  tf.bss = ap_id;
  tf.ul_target_rssi_dbm = target;
  tf.tx_power_dbm = ap_node.max_tx_power_dbm;

  // Predicted per-STA SINR at the target power drives MCS choice and the
  // PPDU length; the genie active set is whatever is on the air right now.
  std::int64_t max_syms = 1;
  double highest_min_snr = -1e300;
  int stream = 0;
  for (int s : sched) {
    // power control works on the average loss; the perfect-CSI MCS choice
    // sees the drop's actual channel including its static fading
    const double tx_p = ul_tx_power_dbm(target, avg_loss_db(s, ap_id),
                                        dep_.node(s).max_tx_power_dbm);
    std::vector<double> interferers = active_interferers_mw(
        ap_id, ap_id, now_ + kTriggerAirtimeNs + kSifs);
    const double predicted =
        zf_receive_sinr_db(tx_p - loss_db(s, ap_id), ap_node.n_antennas,
                           n_streams, noise_mw_[ap_id], interferers);
    const McsEntry& mcs = select_mcs(mcs_, predicted);
    highest_min_snr = std::max(highest_min_snr, mcs.min_snr_db);

    const std::int64_t bits_x12 = queued_air_bits(s) * 12;
    const std::int64_t per_sym_x12 = bits_x12_per_symbol(mcs, bw);
    max_syms = std::max(max_syms, (bits_x12 + per_sym_x12 - 1) / per_sym_x12);

    ScheduledSta entry;
    entry.sta_id = s;
    entry.stream_index = stream++;
    entry.mcs_index = mcs.index;
    entry.tx_power_dbm = tx_p;
    tf.scheduled.push_back(entry);
  }
  tf.ul_symbols = static_cast<int>(
      std::min<std::int64_t>(max_syms, kMaxUlSymbols));
  tf.ul_duration_ns = kPreambleNs + tf.ul_symbols * kSymbolDurationNs;

  tf.psr_allowed = cfg_.psr.enabled;
  if (tf.psr_allowed) {
    tf.i_ap_dbm = acceptable_interference_dbm(target, highest_min_snr,
                                              cfg_.psr.safety_margin_db);
    tf.psr_input_dbm = psr_input_dbm(tf.tx_power_dbm, tf.i_ap_dbm);
  }

  TxopState txop;
  txop.ap = ap_id;
  txop.tf = std::move(tf);
  txop.tf_start = now_;
  txop.ul_start = now_ + kTriggerAirtimeNs + kSifs;
  txop.ul_end = txop.ul_start + txop.tf.ul_duration_ns;
  txop.end = txop.ul_end + kSifs + kBlockAckAirtimeNs;
  if (txop.end - txop.tf_start > kTxopLimitNs) {
    throw SimError("TXOP exceeds the 4 ms limit");
  }
  const int txop_id = static_cast<int>(txops_.size());
  txops_.push_back(std::move(txop));

  ap.in_txop = true;
  ap.current_txop = txop_id;
  ap.contending = false;
  ap.attempt_time = -1;
  ap.epoch++;
  result_.n_txops++;
  result_.max_txop_span_ns =
      std::max(result_.max_txop_span_ns, txops_[txop_id].end - now_);

  txops_[txop_id].tf_tid = create_transmission(
      ap_id, FrameKind::Trigger, ap_node.max_tx_power_dbm, now_,
      now_ + kTriggerAirtimeNs, txops_[txop_id].end, txop_id);
}

void DropSim::on_tf_end(int tid) {
  const Transmission& tf_tx = txs_[tid];
  const int txop_id = tf_tx.txop;
  TxopState& txop = txops_[txop_id];
  schedule(txop.ul_start, Ev::UlPhase, txop_id);

  if (cfg_.psr.enabled && txop.tf.psr_allowed) {
    for (int s : grabbers_) {
      if (!tf_tx.detected_by[s]) continue;  // must decode the trigger
      const double rpl = txop.tf.tx_power_dbm - loss_db(txop.ap, s);
      auto sro = detect_sro(bss_of(s), txop.tf.bss, txop.tf.psr_allowed,
                            txop.tf.psr_input_dbm, txop.tf.i_ap_dbm, rpl,
                            cfg_.channel.bandwidth_mhz,
                            dep_.node(s).max_tx_power_dbm, txop.ul_start,
                            txop.ul_end);
      if (!sro) {
        if (bss_of(s) != txop.tf.bss) result_.sro_denied_floor++;
        continue;
      }
      result_.sro_granted++;
      StaState& st = stas_[s];
      // keep a still-valid opportunity with the larger power budget
      if (st.has_sro && st.sro.deadline_ns > now_ &&
          st.sro.max_tx_power_dbm > sro->max_tx_power_dbm) {
        continue;
      }
      st.has_sro = true;
      st.sro = *sro;
    }
  }
}

void DropSim::on_ul_phase(int txop_id) {
  TxopState& txop = txops_[txop_id];
  // copy: creating the UL transmissions below may reallocate txs_
  const std::vector<std::uint8_t> tf_decoded = txs_[txop.tf_tid].detected_by;
  const int bw = cfg_.channel.bandwidth_mhz;

  for (const ScheduledSta& sch : txop.tf.scheduled) {
    StaState& st = stas_[sch.sta_id];
    // a scheduled STA takes part only if it decoded the trigger, is not
    // already transmitting, and still has data
    if (!tf_decoded[sch.sta_id]) continue;
    if (st.busy_until > now_ || node_transmitting(sch.sta_id)) continue;
    if (st.queue.empty()) continue;

    Participant part;
    part.sta = sch.sta_id;
    part.mcs_index = sch.mcs_index;
    part.tx_power_dbm = sch.tx_power_dbm;

    const std::int64_t per_sym_x12 = bits_x12_per_symbol(mcs_[sch.mcs_index], bw);
    std::int64_t cum_bits_x12 = 0;
    std::int64_t prev_hi_sym = 0;
    while (!st.queue.empty()) {
      const QueuedMpdu& m = st.queue.front();
      const std::int64_t next_bits = cum_bits_x12 + m.air_bits() * 12;
      const std::int64_t hi_sym = (next_bits + per_sym_x12 - 1) / per_sym_x12;
      if (hi_sym > txop.tf.ul_symbols) break;
      MpduSlice slice;
      slice.mpdu = m;
      slice.lo = txop.ul_start + kPreambleNs + prev_hi_sym * kSymbolDurationNs;
      slice.hi = txop.ul_start + kPreambleNs + hi_sym * kSymbolDurationNs;
      part.slices.push_back(slice);
      st.queue.pop_front();
      cum_bits_x12 = next_bits;
      prev_hi_sym = hi_sym;
    }
    if (part.slices.empty()) {
      // head MPDU alone does not fit the planned PPDU; leave it queued
      continue;
    }
    st.busy_until = txop.ul_end;
    create_transmission(sch.sta_id, FrameKind::UlData, sch.tx_power_dbm, now_,
                        txop.ul_end, txop.end, txop_id);
    txop.participants.push_back(std::move(part));
  }

  if (txop.participants.empty()) {
    // nobody answered the trigger: a failed exchange; hold the reserved
    // window, then tear down
    aps_[txop.ap].cw = next_cw_after_failure(aps_[txop.ap].cw);
    schedule(txop.end, Ev::TxopDone, txop_id);
    return;
  }
  schedule(txop.ul_end, Ev::UlDone, txop_id);
}

void DropSim::on_ul_done(int txop_id) {
  TxopState& txop = txops_[txop_id];
  const int ap_id = txop.ap;
  const Node& ap_node = dep_.node(ap_id);
  const int k_streams = static_cast<int>(txop.participants.size());

  // advance the log scan window; nothing this old can overlap future queries
  while (scan_from_ < txs_.size() &&
         txs_[scan_from_].end + kTxopLimitNs + kMillisecond < now_) {
    ++scan_from_;
  }

  int successes = 0;
  for (Participant& part : txop.participants) {
    const double desired = part.tx_power_dbm - loss_db(part.sta, ap_id);
    const bool detectable = desired >= sens_dbm_;
    const McsEntry& mcs = mcs_[part.mcs_index];
    std::vector<QueuedMpdu> failed;
    for (const MpduSlice& slice : part.slices) {
      std::vector<double> interferers =
          interval_interferers_mw(ap_id, slice.lo, slice.hi, txop.tf.bss);
      const double sinr =
          zf_receive_sinr_db(desired, ap_node.n_antennas, k_streams,
                             noise_mw_[ap_id], interferers);
      if (detectable && reception_succeeds(sinr, mcs, mac_rng_)) {
        ++successes;
        deliver(slice.mpdu, now_, false);
      } else {
        fail_mpdu(part.sta, slice.mpdu, failed);
      }
    }
    requeue_failed(part.sta, failed);
    part.slices.clear();
  }

  ApState& ap = aps_[ap_id];
  ap.cw = successes > 0 ? kCwMin : next_cw_after_failure(ap.cw);

  create_transmission(ap_id, FrameKind::BlockAck, ap_node.max_tx_power_dbm,
                      now_ + kSifs, txop.end, txop.end, txop_id);
  schedule(txop.end, Ev::TxopDone, txop_id);
}

void DropSim::on_txop_done(int txop_id) {
  const TxopState& txop = txops_[txop_id];
  ApState& ap = aps_[txop.ap];
  ap.in_txop = false;
  ap.current_txop = -1;
  ap.backoff = static_cast<int>(mac_rng_.uniform_int(0, ap.cw));
}

void DropSim::deliver(const QueuedMpdu& m, TimeNs when, bool via_sr) {
  FileState& f = files_[m.file];
  f.mpdus_left--;
  if (via_sr) f.via_sr = true;
  result_.delivered_payload_bytes += m.msdu_bytes;
  if (f.mpdus_left == 0 && !f.abandoned) f.completed = when;
}

void DropSim::fail_mpdu(int sta, QueuedMpdu m, std::vector<QueuedMpdu>& failed) {
  if (files_[m.file].abandoned) return;  // siblings of a dead file go with it
  m.retry++;
  if (m.retry > kRetryLimit) {
    if (!m.reinjected) {
      // one fresh lease on life at the head of the queue
      m.reinjected = true;
      m.retry = 0;
      failed.push_back(m);
    } else {
      FileState& f = files_[m.file];
      f.abandoned = true;
      // the file can no longer complete; drop its remaining MPDUs
      auto& q = stas_[sta].queue;
      q.erase(std::remove_if(q.begin(), q.end(),
                             [&](const QueuedMpdu& x) { return x.file == m.file; }),
              q.end());
    }
    return;
  }
  failed.push_back(m);
}

void DropSim::requeue_failed(int sta, std::vector<QueuedMpdu>& failed) {
  auto& q = stas_[sta].queue;
  for (auto it = failed.rbegin(); it != failed.rend(); ++it) q.push_front(*it);
  failed.clear();
}

// --- PSR --------------------------------------------------------------------

void DropSim::try_sr(int sta) {
  StaState& st = stas_[sta];
  if (!st.has_sro) return;
  const SpatialReuseOpportunity& sro = st.sro;
  if (now_ < sro.window_start_ns || now_ >= sro.deadline_ns) return;
  if (st.sr_hold_until > now_) return;
  if (st.busy_until > now_ || node_transmitting(sta)) return;
  if (st.queue.empty()) return;
  // physical carrier sense, energy rule only: the NAV is ignored
  if (active_energy_mw(sta) >= ed_mw_) {
    result_.sr_defer_cs++;
    return;
  }

  const int ap_id = bss_of(sta);
  const int bw = cfg_.channel.bandwidth_mhz;
  // Transmit below the cap by the bandwidth normalization term, so the
  // total (not just per-20-MHz) power arriving at the donor stays within
  // its acceptable interference level.
  const double bw_term_db = 10.0 * std::log10(bw / 20.0);
  const double power =
      std::min(sro.max_tx_power_dbm - bw_term_db,
               dep_.node(sta).max_tx_power_dbm);

  // The SR stream needs a receive degree of freedom on top of any uplink
  // the own AP is currently taking in.
  const int k_streams = own_ul_streams(ap_id, now_, now_ + 1) + 1;
  std::vector<double> interferers =
      active_interferers_mw(ap_id, bss_of(sta), now_);
  const double predicted =
      zf_receive_sinr_db(power - loss_db(sta, ap_id),
                         dep_.node(ap_id).n_antennas, k_streams,
                         noise_mw_[ap_id], interferers);
  if (predicted < mcs_.front().min_snr_db) {
    // no MCS closes this link while the current interferers are on the air;
    // a transmission now would only burn the MPDU's retry budget
    result_.sr_defer_sinr++;
    return;
  }
  // link-adaptation margin against interferers that appear mid-PPDU
  // (control bursts from other BSSs are invisible to the prediction)
  constexpr double kSrLinkMarginDb = 5.0;
  const McsEntry& mcs = select_mcs(mcs_, predicted - kSrLinkMarginDb);

  const QueuedMpdu head = st.queue.front();
  const TimeNs ppdu =
      ppdu_duration_ns(head.msdu_bytes + kMpduHeaderBytes, mcs, bw, 1);
  if (!sr_fits_window(now_, ppdu, kSifs, kAckAirtimeNs, sro.deadline_ns)) {
    return;  // would outlive the donor's window; keep the SRO and wait
  }

  // Condition 2 must hold at transmit time, by construction of the cap
  if (power - bw_term_db > sro.psr_input_dbm - sro.rpl_dbm + 1e-9) {
    throw SimError("SR transmission violates its interference budget");
  }

  st.queue.pop_front();
  st.sr_inflight = head;
  st.sr_count++;
  st.busy_until = now_ + ppdu;
  st.sr_hold_until = now_ + ppdu + kSifs + kAckAirtimeNs;

  const int tid = create_transmission(sta, FrameKind::SrData, power, now_,
                                      now_ + ppdu, st.sr_hold_until);
  txs_[tid].sr_mcs = mcs.index;

  SrAudit audit;
  audit.sta_id = sta;
  audit.sta_bss = bss_of(sta);
  audit.donor_ap = sro.donor_ap;
  audit.start_ns = now_;
  audit.end_with_ack_ns = st.sr_hold_until;
  audit.deadline_ns = sro.deadline_ns;
  audit.tx_power_dbm = power;
  audit.psr_input_dbm = sro.psr_input_dbm;
  audit.rpl_dbm = sro.rpl_dbm;
  audit.i_ap_dbm = sro.i_ap_dbm;
  audit.donor_interference_per20_dbm =
      power - bw_term_db - avg_loss_db(sta, sro.donor_ap);
  result_.sr_audits.push_back(audit);

  schedule(st.sr_hold_until, Ev::Reeval);  // try the next file after the ACK slot
}

void DropSim::on_sr_end(int tid) {
  const int sta = txs_[tid].tx_node;
  const double tx_power = txs_[tid].tx_power_dbm;
  const TimeNs start = txs_[tid].start;
  const TimeNs end = txs_[tid].end;
  const int mcs_index = txs_[tid].sr_mcs;
  const int ap_id = bss_of(sta);
  StaState& st = stas_[sta];

  while (scan_from_ < txs_.size() &&
         txs_[scan_from_].end + kTxopLimitNs + kMillisecond < now_) {
    ++scan_from_;
  }

  const double desired = tx_power - loss_db(sta, ap_id);
  const int k_streams = own_ul_streams(ap_id, start, end) + 1;
  const bool ap_was_transmitting = ap_tx_overlaps(ap_id, start, end);
  std::vector<double> interferers =
      interval_interferers_mw(ap_id, start, end, bss_of(sta));
  const double sinr =
      zf_receive_sinr_db(desired, dep_.node(ap_id).n_antennas, k_streams,
                         noise_mw_[ap_id], interferers);

  const bool ok = !ap_was_transmitting && desired >= sens_dbm_ &&
                  reception_succeeds(sinr, mcs_[mcs_index], mac_rng_);
  if (ok) {
    deliver(st.sr_inflight, now_, true);
    // normal ACK inside the SRO window, if the AP is free to send it
    const TimeNs ack_start = now_ + kSifs;
    if (!ap_tx_overlaps(ap_id, ack_start, ack_start + kAckAirtimeNs) &&
        !aps_[ap_id].in_txop) {
      create_transmission(ap_id, FrameKind::Ack,
                          dep_.node(ap_id).max_tx_power_dbm, ack_start,
                          ack_start + kAckAirtimeNs,
                          ack_start + kAckAirtimeNs);
    }
  } else {
    result_.sr_failed++;
    std::vector<QueuedMpdu> failed;
    fail_mpdu(sta, st.sr_inflight, failed);
    requeue_failed(sta, failed);
  }
}

}  // namespace

DropWorld build_drop_world(const SimConfig& cfg, std::uint64_t seed) {
  Rng placement_rng(derive_seed(seed, 1));
  Rng largescale_rng(derive_seed(seed, 2));
  Rng fading_rng(derive_seed(seed, 5));
  Deployment dep = deploy(cfg.scenario, placement_rng);
  ChannelModel channel(dep, cfg.channel, largescale_rng, fading_rng);
  associate(dep, channel);
  return DropWorld{std::move(dep), std::move(channel)};
}

DropResult run_drop(const SimConfig& cfg, std::uint64_t seed, int drop_index) {
  DropSim sim(cfg, seed, drop_index);
  return sim.run();
}

}  // namespace psrsim
