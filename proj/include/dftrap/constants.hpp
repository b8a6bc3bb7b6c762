#pragma once

#include <numbers>

namespace dftrap::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// CODATA 2018 exact / recommended values, SI.
inline constexpr double elementary_charge = 1.602176634e-19;   // C
inline constexpr double epsilon0 = 8.8541878128e-12;            // F/m
inline constexpr double coulomb_k = 1.0 / (4.0 * pi * epsilon0); // N m^2 / C^2
inline constexpr double hbar = 1.054571817e-34;                 // J s
inline constexpr double boltzmann = 1.380649e-23;               // J/K
inline constexpr double atomic_mass = 1.66053906660e-27;        // kg

}  // namespace dftrap::constants
