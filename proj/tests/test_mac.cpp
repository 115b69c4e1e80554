#include <algorithm>
#include <map>

#include "doctest.h"

#include "psrsim/mac.hpp"
#include "psrsim/units.hpp"

using namespace psrsim;

TEST_CASE("contention window progression") {
  int cw = kCwMin;
  cw = next_cw_after_failure(cw);
  CHECK(cw == 31);
  cw = next_cw_after_failure(cw);
  CHECK(cw == 63);  // two consecutive failures from CWmin
  for (int i = 0; i < 10; ++i) cw = next_cw_after_failure(cw);
  CHECK(cw == kCwMax);
}

TEST_CASE("uplink power control") {
  CHECK(ul_tx_power_dbm(-60.0, 70.0, 15.0) == doctest::Approx(10.0));
  CHECK(ul_tx_power_dbm(-60.0, 90.0, 15.0) == doctest::Approx(15.0));  // capped
}

TEST_CASE("target RSSI is the weakest reachable level, clamped") {
  const double floor = -86.0;  // level where the weakest link still closes
  CHECK(ul_target_rssi_dbm({-55.0, -62.0, -48.0}, 0.0, floor) ==
        doctest::Approx(-62.0));
  CHECK(ul_target_rssi_dbm({-100.0, -95.0}, 0.0, floor) == doctest::Approx(-90.0));
  CHECK(ul_target_rssi_dbm({-20.0}, 0.0, floor) == doctest::Approx(-40.0));
  // the backoff keeps the weakest STA below its maximum transmit power
  CHECK(ul_target_rssi_dbm({-55.0, -62.0}, 12.0, floor) == doctest::Approx(-74.0));
  // but never below the level where the weakest link stops closing
  CHECK(ul_target_rssi_dbm({-80.0}, 12.0, floor) == doctest::Approx(-86.0));
  // links that cannot reach the useful level get no headroom at all
  CHECK(ul_target_rssi_dbm({-88.0}, 12.0, floor) == doctest::Approx(-88.0));
}

TEST_CASE("round-robin selection") {
  const std::vector<int> members = {10, 11, 12, 13, 14, 15};
  std::size_t cursor = 0;
  const auto all = [](int) { return true; };

  auto pick = pick_round_robin(members, cursor, all, 4);
  CHECK(pick == std::vector<int>{10, 11, 12, 13});
  pick = pick_round_robin(members, cursor, all, 4);
  CHECK(pick == std::vector<int>{14, 15, 10, 11});
  pick = pick_round_robin(members, cursor, all, 4);
  CHECK(pick == std::vector<int>{12, 13, 14, 15});

  // saturated members get slot counts within +-1 of each other
  std::map<int, int> counts;
  cursor = 0;
  for (int round = 0; round < 100; ++round) {
    for (int s : pick_round_robin(members, cursor, all, 4)) counts[s]++;
  }
  int lo = 1 << 30, hi = 0;
  for (const auto& [sta, c] : counts) {
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  CHECK(hi - lo <= 1);
}

TEST_CASE("round-robin skips members without data") {
  const std::vector<int> members = {1, 2, 3, 4};
  std::size_t cursor = 0;
  const auto only_even = [](int s) { return s % 2 == 0; };
  const auto pick = pick_round_robin(members, cursor, only_even, 4);
  CHECK(pick == std::vector<int>{2, 4});
  const auto none = [](int) { return false; };
  std::size_t cursor2 = 0;
  CHECK(pick_round_robin(members, cursor2, none, 4).empty());
  CHECK(cursor2 == 0);
}

TEST_CASE("TXOP budget constant") {
  // TF + SIFS + (preamble + symbols) + SIFS + BlockAck within 4 ms
  const TimeNs span = kTriggerAirtimeNs + kSifs + kPreambleNs +
                      kMaxUlSymbols * kSymbolDurationNs + kSifs +
                      kBlockAckAirtimeNs;
  CHECK(span <= kTxopLimitNs);
  const TimeNs with_one_more = span + kSymbolDurationNs;
  CHECK(with_one_more > kTxopLimitNs);
}

TEST_CASE("carrier sense clauses") {
  // energy at or above -62 dBm marks the medium busy
  CHECK(medium_busy(dbm_to_mw(-61.0), 0, 0, 0));
  CHECK(medium_busy(dbm_to_mw(-62.0), 0, 0, 0));
  // a running NAV alone is enough, however faint the air is
  CHECK(medium_busy(dbm_to_mw(-95.0), 0, 1 * kMillisecond, 0));
  // nothing detected, NAV clear, energy below threshold: idle
  CHECK(!medium_busy(dbm_to_mw(-95.0), 0, 0, 0));
  CHECK(!medium_busy(dbm_to_mw(-95.0), 0, 500, 1000));  // NAV already expired
  // a tracked preamble holds the medium busy for the frame duration
  CHECK(medium_busy(dbm_to_mw(-95.0), 1, 0, 0));
}
