#include <cmath>

#include "doctest.h"
#include "dftrap/config.hpp"
#include "dftrap/errors.hpp"
#include "dftrap/units.hpp"
#include "oracles.hpp"

using namespace dftrap;
using units::Dimension;

TEST_CASE("unit conversions") {
  CHECK(units::parse("2.5 kVpp", Dimension::voltage) == doctest::Approx(1250.0));
  CHECK(units::parse("75 V", Dimension::voltage) == 75.0);
  CHECK(units::parse("17.5 MHz", Dimension::angular_freq) == doctest::Approx(oracle::kTwoPi * 17.5e6));
  CHECK(units::parse("69 nHz", Dimension::angular_freq) == doctest::Approx(oracle::kTwoPi * 69e-9));
  CHECK(units::parse("100 rad/s", Dimension::angular_freq) == 100.0);
  CHECK(units::parse("3 s^-1", Dimension::rate) == 3.0);
  CHECK(units::parse("0.9 mm", Dimension::length) == doctest::Approx(0.9e-3));
  CHECK(units::parse("40 u", Dimension::mass) == doctest::Approx(40 * 1.66053906660e-27));
  CHECK(units::parse("800 e", Dimension::charge) == 800.0);
  CHECK(units::parse("  0.93 ", Dimension::dimensionless) == doctest::Approx(0.93));
}

TEST_CASE("unit errors") {
  CHECK_THROWS_AS(units::parse("2.5 kg", Dimension::voltage), ConfigError);
  CHECK_THROWS_AS(units::parse("abc V", Dimension::voltage), ConfigError);
  CHECK_THROWS_AS(units::parse("17.5", Dimension::angular_freq), ConfigError);
  CHECK_THROWS_AS(units::parse("", Dimension::length), ConfigError);
}

TEST_CASE("format round-trips through parse") {
  for (double v : {1.0 / 3.0, 1250.0, 6.64e-26, -0.1}) {
    for (Dimension d : {Dimension::voltage, Dimension::mass, Dimension::length, Dimension::angular_freq})
      CHECK(units::parse(units::format(v, d), d) == v);
  }
}

TEST_CASE("config file quantities carry units") {
  const auto c = config::from_json_text(R"({"trap": {"v_fast": "3 kVpp", "omega_fast": "20 MHz"}})");
  CHECK(c.trap.v_fast == doctest::Approx(1500.0));
  CHECK(c.trap.omega_fast == doctest::Approx(oracle::kTwoPi * 20e6));
  // untouched fields keep the preset
  CHECK(c.trap.r0 == config::preset("paper").trap.r0);
}

TEST_CASE("bare numbers are only accepted for dimensionless fields") {
  CHECK_NOTHROW(config::from_json_text(R"({"trap": {"kappa_geo": 0.9}})"));
  CHECK_THROWS_AS(config::from_json_text(R"({"trap": {"v_fast": 1250}})"), ConfigError);
  CHECK_THROWS_AS(config::from_json_text(R"({"trap": {"v_fast": "1250 Hz"}})"), ConfigError);
}

TEST_CASE("malformed configs") {
  CHECK_THROWS_AS(config::from_json_text("{"), ConfigError);
  CHECK_THROWS_AS(config::from_json_text("[]"), ConfigError);
  CHECK_THROWS_AS(config::from_json_text(R"({"preset": "nope"})"), ConfigError);
  CHECK_THROWS_AS(config::from_json_text(R"({"roles": {"ion": "ghost"}})"), ConfigError);
  CHECK_THROWS_AS(config::load_file("/nonexistent/dftrap.json"), ConfigError);
  CHECK_THROWS_AS(config::preset("unknown"), ConfigError);
}

TEST_CASE("parse -> serialize -> parse is the identity") {
  const auto a = config::preset("paper");
  const auto b = config::from_json_text(config::to_json_text(a));
  CHECK(a == b);
  CHECK(config::to_json_text(b) == config::to_json_text(a));

  auto c = a;
  c.trap.v_slow = 1.0 / 3.0;
  c.seed = 7;
  c.workers = 3;
  c.particles["extra"] = presets::nanoparticle_light();
  c.schedule = {{{1.5, -2.25}, 3.0}};
  const auto d = config::from_json_text(config::to_json_text(c));
  CHECK(c == d);
}

TEST_CASE("preset particles") {
  const auto c = config::preset("paper");
  CHECK(c.ion().charge == 1);
  CHECK(c.nanoparticle().charge == 800);
  CHECK(c.cooling_nanoparticle().mass == doctest::Approx(1.6e-17));
  CHECK_NOTHROW(c.validate());
  CHECK_THROWS_AS(c.particle("missing"), ConfigError);
}
