#pragma once

// Quantity strings with explicit units ("2.5 kVpp", "17.5 MHz", "800 e") to SI.

#include <string>
#include <string_view>

namespace dftrap::units {

enum class Dimension {
  dimensionless,
  length,         // m
  voltage,        // V amplitude; a "pp" suffix is halved
  angular_freq,   // rad/s; Hz-family units are multiplied by 2 pi
  rate,           // 1/s; plain s^-1 or 1/s, no 2 pi
  time,           // s
  mass,           // kg
  charge,         // multiples of e
  power,          // J/s
  field,          // V/m
  field_per_volt  // (V/m)/V = 1/m
};

const char* to_string(Dimension d);

/// Parses "<number> [unit]" and converts to SI for the requested dimension.
/// Throws ConfigError on a malformed number or a unit of the wrong dimension.
double parse(std::string_view text, Dimension d);

/// Inverse of parse for the canonical SI unit (shortest round-trip number).
std::string format(double si_value, Dimension d);

}  // namespace dftrap::units
