#include <cmath>

#include "doctest.h"

#include "psrsim/psr.hpp"
#include "psrsim/rng.hpp"

using namespace psrsim;

TEST_CASE("acceptable interference") {
  CHECK(acceptable_interference_dbm(-60.0, 30.0, 3.0) == doctest::Approx(-93.0));
  CHECK(acceptable_interference_dbm(-60.0, 30.0, 0.0) == doctest::Approx(-90.0));
}

TEST_CASE("PSR input") {
  CHECK(psr_input_dbm(24.0, -93.0) == doctest::Approx(-69.0));
  CHECK(psr_input_dbm(20.0, -93.0) == doctest::Approx(-73.0));
}

TEST_CASE("spatial-reuse power cap") {
  CHECK(max_sr_tx_power_dbm(-46.0, -60.0, 20, 15.0) == doctest::Approx(14.0));
  // 80 MHz adds 10log10(4) of headroom, then the hardware cap binds
  CHECK(max_sr_tx_power_dbm(-46.0, -60.0, 80, 15.0) == doctest::Approx(15.0));
  CHECK(max_sr_tx_power_dbm(-50.0, -50.0, 20, 15.0) == doctest::Approx(0.0));
}

TEST_CASE("SRO detection conditions") {
  // intra-BSS trigger frames never grant an opportunity
  CHECK(!detect_sro(1, 1, true, -46.0, -70.0, -60.0, 80, 15.0, 0, 1000));
  // trigger frames that do not allow PSR never grant one
  CHECK(!detect_sro(2, 1, false, -46.0, -70.0, -60.0, 80, 15.0, 0, 1000));

  // workable budget: PSR_INPUT -46, RPL -60 at 80 MHz caps at the hardware max
  const auto sro = detect_sro(2, 1, true, -46.0, -70.0, -60.0, 80, 15.0, 100, 900);
  REQUIRE(sro.has_value());
  CHECK(sro->max_tx_power_dbm == doctest::Approx(15.0));
  CHECK(sro->donor_ap == 1);
  CHECK(sro->window_start_ns == 100);
  CHECK(sro->deadline_ns == 900);

  // hopeless budget: -69 - (-40) = -29 dB per 20 MHz, below the power floor
  CHECK(!detect_sro(2, 1, true, -69.0, -70.0, -40.0, 80, 15.0, 0, 1000));
  // marginal budget just above the floor is still granted
  const auto thin = detect_sro(2, 1, true, -69.0, -70.0, -50.0, 80, 15.0, 0, 1000);
  REQUIRE(thin.has_value());
  CHECK(thin->max_tx_power_dbm ==
        doctest::Approx(-69.0 + 50.0 + 10.0 * std::log10(4.0)));
}

TEST_CASE("granted caps always satisfy the interference inequality") {
  Rng rng(77);
  for (int i = 0; i < 2000; ++i) {
    const double psr_input = -90.0 + rng.uniform01() * 60.0;
    const double rpl = -90.0 + rng.uniform01() * 50.0;
    const int bw = (i % 3 == 0) ? 20 : (i % 3 == 1) ? 40 : 80;
    const auto sro =
        detect_sro(2, 0, true, psr_input, -80.0, rpl, bw, 15.0, 0, 1000);
    if (!sro) continue;
    const double lhs =
        sro->max_tx_power_dbm - 10.0 * std::log10(bw / 20.0);
    CHECK(lhs <= psr_input - rpl + 1e-9);
  }
}

TEST_CASE("duration rule") {
  // remaining window 50 us, needed 120 us -> defer
  CHECK(!sr_fits_window(0, 74'000, 16'000, 30'000, 50'000));
  CHECK(sr_fits_window(0, 74'000, 16'000, 30'000, 120'000));
  CHECK(sr_fits_window(10'000, 64'000, 16'000, 30'000, 120'000));
  CHECK(!sr_fits_window(10'001, 64'000, 16'000, 30'000, 120'000));
}
