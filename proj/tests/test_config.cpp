#include <doctest.h>

#include <cmath>

#include "raman_egn/config.hpp"
#include "raman_egn/units.hpp"

using namespace raman;

namespace {

const char* kDeskConfig = R"json({
  "reference_wavelength_nm": 1550,
  "channels": {
    "count": 5,
    "spacing_ghz": 10.001,
    "symbol_rate_gbd": 10,
    "power_dbm": -1,
    "format": "qpsk"
  },
  "spans": [
    {
      "length_km": 100,
      "loss_db_per_km": 0.2,
      "dispersion_ps_nm_km": 17,
      "gamma_per_w_km": 1.2,
      "raman_slope_per_w_km_thz": 1.12,
      "gain": "compensate"
    }
  ],
  "run": {"profile": "simplified", "seed": 7, "tol_db": 0.05}
})json";

}  // namespace

TEST_CASE("engineering units normalize to SI") {
  Config cfg = parse_config_text(kDeskConfig);
  auto result = validate(cfg);
  CHECK(result.ok());

  CHECK(cfg.plan.count() == 5);
  CHECK(cfg.plan.at(1).center_freq == doctest::Approx(-2.0 * 10.001e9));
  CHECK(cfg.plan.at(3).center_freq == doctest::Approx(0.0));
  CHECK(cfg.plan.at(5).bandwidth == doctest::Approx(10e9 * (1.0 + cfg.run.rolloff)));
  CHECK(cfg.plan.at(2).launch_power == doctest::Approx(dbm_to_watt(-1.0)).epsilon(1e-12));

  const Span& s = cfg.link.spans.front();
  CHECK(s.length == 1e5);
  CHECK(s.attenuation.flat == doctest::Approx(attenuation_np_per_m(0.2)).epsilon(1e-15));
  CHECK(s.beta2 == doctest::Approx(-2.168e-26).epsilon(1e-3));
  CHECK(s.gamma == doctest::Approx(1.2e-3).epsilon(1e-12));
  CHECK(s.raman_slope == doctest::Approx(1.12e-15).epsilon(1e-12));
  CHECK(s.amp_gain.mode == GainMode::Compensate);
  CHECK(cfg.run.seed == 7);
}

TEST_CASE("normalized form round-trips bit for bit") {
  Config cfg = parse_config_text(kDeskConfig);
  REQUIRE(validate(cfg).ok());
  const std::string first = emit_normalized(cfg);
  Config reloaded = parse_config_text(first);
  REQUIRE(validate(reloaded).ok());
  const std::string second = emit_normalized(reloaded);
  CHECK(first == second);
}

TEST_CASE("validation failures") {
  SUBCASE("overlapping channels name both indices") {
    Config cfg = parse_config_text(R"json({
      "channels": [
        {"center_ghz": 0, "bandwidth_ghz": 12, "power_dbm": 0, "format": "qpsk"},
        {"center_ghz": 10, "bandwidth_ghz": 12, "power_dbm": 0, "format": "qpsk"}
      ],
      "spans": [{"length_km": 80, "loss_db_per_km": 0.2, "dispersion_ps_nm_km": 17,
                 "gamma_per_w_km": 1.2}]
    })json");
    auto res = validate(cfg);
    REQUIRE(!res.ok());
    CHECK(res.violations.front().where == "channel 2");
    CHECK(res.violations.front().message.find("channel 1") != std::string::npos);
  }

  SUBCASE("zero-length span") {
    Config cfg = parse_config_text(R"json({
      "channels": {"count": 1, "spacing_ghz": 10, "symbol_rate_gbd": 10,
                   "power_dbm": 0, "format": "qpsk"},
      "spans": [{"length_km": 0, "loss_db_per_km": 0.2, "dispersion_ps_nm_km": 17,
                 "gamma_per_w_km": 1.2}]
    })json");
    auto res = validate(cfg);
    REQUIRE(!res.ok());
    CHECK(res.violations.front().where == "span 1");
  }

  SUBCASE("unknown format") {
    Config cfg = parse_config_text(R"json({
      "channels": {"count": 1, "spacing_ghz": 10, "symbol_rate_gbd": 10,
                   "power_dbm": 0, "format": "nope"},
      "spans": [{"length_km": 80, "loss_db_per_km": 0.2, "dispersion_ps_nm_km": 17,
                 "gamma_per_w_km": 1.2}]
    })json");
    CHECK(!validate(cfg).ok());
  }

  SUBCASE("gain table must cover the band") {
    Config cfg = parse_config_text(R"json({
      "channels": {"count": 5, "spacing_ghz": 10.001, "symbol_rate_gbd": 10,
                   "power_dbm": 0, "format": "qpsk"},
      "spans": [{"length_km": 80, "loss_db_per_km": 0.2, "dispersion_ps_nm_km": 17,
                 "gamma_per_w_km": 1.2,
                 "gain_table_db": [[-5, 20], [5, 20]]}]
    })json");
    CHECK(!validate(cfg).ok());
  }

  SUBCASE("the reference comb is valid") {
    Config cfg = parse_config_text(R"json({
      "channels": {"count": 101, "spacing_ghz": 10.001, "symbol_rate_gbd": 10,
                   "power_dbm": -1, "format": "qpsk"},
      "spans": [{"length_km": 100, "loss_db_per_km": 0.2, "dispersion_ps_nm_km": 17,
                 "gamma_per_w_km": 1.2, "raman_slope_per_w_km_thz": 1.12,
                 "gain": "compensate"}]
    })json");
    CHECK(validate(cfg).ok());
    CHECK(cfg.plan.count() == 101);
  }
}

TEST_CASE("user formats from config") {
  Config cfg = parse_config_text(R"json({
    "formats": {
      "bpsk": {"points": [[1, 0], [-1, 0]]},
      "byebye": {"moments": {"m2": 1.0, "m4": 1.5, "m6": 2.8}}
    },
    "channels": {"count": 2, "spacing_ghz": 10.001, "symbol_rate_gbd": 10,
                 "power_dbm": 0, "format": "bpsk"},
    "spans": [{"length_km": 80, "loss_db_per_km": 0.2, "dispersion_ps_nm_km": 17,
               "gamma_per_w_km": 1.2}]
  })json");
  CHECK(validate(cfg).ok());
  CHECK(cfg.formats.get("bpsk").phi() == doctest::Approx(-1.0));
  CHECK(cfg.formats.get("byebye").moments().m4 == 1.5);
}

TEST_CASE("tabulated attenuation and gain parse") {
  Config cfg = parse_config_text(R"json({
    "channels": {"count": 3, "spacing_ghz": 10.001, "symbol_rate_gbd": 10,
                 "power_dbm": 0, "format": "qpsk"},
    "spans": [{"length_km": 80,
               "loss_db_per_km": [[-20, 0.19], [20, 0.21]],
               "dispersion_ps_nm_km": 17, "gamma_per_w_km": 1.2,
               "gain_table_db": [[-20, 16], [20, 16]]}]
  })json");
  REQUIRE(validate(cfg).ok());
  const Span& s = cfg.link.spans.front();
  CHECK(!s.attenuation.is_flat());
  CHECK(s.attenuation(-2e10) == doctest::Approx(attenuation_np_per_m(0.19)).epsilon(1e-12));
  CHECK(s.attenuation(0.0) == doctest::Approx(attenuation_np_per_m(0.20)).epsilon(1e-12));
  CHECK(s.amp_gain.mode == GainMode::Table);
  CHECK(s.amp_gain.value(0.0) == doctest::Approx(db_to_linear(16.0)).epsilon(1e-12));
}
