#pragma once

#include <numbers>

namespace cmag::constants {

// Fixed physical constants (SI). Not configurable.
inline constexpr double hbar = 1.054571817e-34; // J*s
inline constexpr double mu0 = 1.25663706e-6;    // N/A^2

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double pi = std::numbers::pi;

// YIG defaults
inline constexpr double yig_spin_density = 4.22e27; // m^-3
inline constexpr double yig_spin = 2.5;             // ground-state Fe3+
inline constexpr double yig_gamma = two_pi * 28e9;  // rad/s per tesla

} // namespace cmag::constants
