#include "dftrap/units.hpp"

#include <charconv>
#include <cmath>
#include <utility>
#include <vector>

#include <fmt/core.h>

#include "dftrap/constants.hpp"
#include "dftrap/errors.hpp"

namespace dftrap::units {

namespace {

using Table = std::vector<std::pair<std::string_view, double>>;

constexpr double kTwoPi = constants::two_pi;

const Table& table(Dimension d) {
  static const Table dimensionless{{"", 1.0}, {"1", 1.0}};
  static const Table length{{"m", 1.0}, {"cm", 1e-2}, {"mm", 1e-3}, {"um", 1e-6}, {"μm", 1e-6}, {"nm", 1e-9}};
  static const Table voltage{{"V", 1.0},    {"mV", 1e-3},    {"kV", 1e3},
                             {"Vpp", 0.5},  {"mVpp", 0.5e-3}, {"kVpp", 0.5e3}};
  static const Table angular{{"rad/s", 1.0},      {"1/s", 1.0},        {"Hz", kTwoPi},
                             {"kHz", kTwoPi * 1e3}, {"MHz", kTwoPi * 1e6}, {"GHz", kTwoPi * 1e9},
                             {"mHz", kTwoPi * 1e-3}, {"uHz", kTwoPi * 1e-6}, {"nHz", kTwoPi * 1e-9}};
  static const Table rate{{"1/s", 1.0}, {"s^-1", 1.0}};
  static const Table time{{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}};
  static const Table mass{{"kg", 1.0}, {"g", 1e-3}, {"u", constants::atomic_mass}, {"amu", constants::atomic_mass}};
  static const Table charge{{"e", 1.0}};
  static const Table power{{"J/s", 1.0}, {"W", 1.0}};
  static const Table field{{"V/m", 1.0}, {"mV/m", 1e-3}, {"V/mm", 1e3}};
  static const Table per_volt{{"V/m/V", 1.0}, {"1/m", 1.0}};
  switch (d) {
    case Dimension::dimensionless: return dimensionless;
    case Dimension::length: return length;
    case Dimension::voltage: return voltage;
    case Dimension::angular_freq: return angular;
    case Dimension::rate: return rate;
    case Dimension::time: return time;
    case Dimension::mass: return mass;
    case Dimension::charge: return charge;
    case Dimension::power: return power;
    case Dimension::field: return field;
    case Dimension::field_per_volt: return per_volt;
  }
  return dimensionless;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

const char* to_string(Dimension d) {
  switch (d) {
    case Dimension::dimensionless: return "dimensionless";
    case Dimension::length: return "length";
    case Dimension::voltage: return "voltage";
    case Dimension::angular_freq: return "angular frequency";
    case Dimension::rate: return "rate";
    case Dimension::time: return "time";
    case Dimension::mass: return "mass";
    case Dimension::charge: return "charge";
    case Dimension::power: return "power";
    case Dimension::field: return "electric field";
    case Dimension::field_per_volt: return "field per volt";
  }
  return "?";
}

double parse(std::string_view text, Dimension d) {
  const std::string_view s = trim(text);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || end == s.data())
    throw ConfigError(fmt::format("'{}': expected a number followed by a {} unit", text, to_string(d)));
  const std::string_view unit = trim(std::string_view(end, s.data() + s.size() - end));
  for (const auto& [name, factor] : table(d))
    if (unit == name) return value * factor;
  std::string known;
  for (const auto& [name, factor] : table(d))
    if (!name.empty()) known += (known.empty() ? "" : ", ") + std::string(name);
  throw ConfigError(fmt::format("'{}': unit '{}' is not a {} unit (expected one of: {})", text, unit,
                                to_string(d), known.empty() ? "none" : known));
}

std::string format(double v, Dimension d) {
  const std::string_view unit = table(d).front().first;
  return unit.empty() ? fmt::format("{}", v) : fmt::format("{} {}", v, unit);
}

}  // namespace dftrap::units
