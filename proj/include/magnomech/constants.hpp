#pragma once

#include <numbers>

namespace magnomech::constants {

inline constexpr double pi = std::numbers::pi_v<double>;
inline constexpr double two_pi = 2.0 * pi;

/// ħ, reduced Planck constant [J·s].
inline constexpr double hbar = 1.054571817e-34;

/// k_B, Boltzmann constant [J/K].
inline constexpr double k_boltzmann = 1.380649e-23;

/// Default YIG spin density [m^-3].
inline constexpr double yig_spin_density = 4.22e27;

/// Default gyromagnetic ratio, 2π × 28 GHz/T [rad/(s·T)].
inline constexpr double gyromagnetic_default = two_pi * 28e9;

}  // namespace magnomech::constants
