#pragma once

#include <array>
#include <complex>
#include <string>

#include "magnomech/config.hpp"

namespace magnomech {

/// Classical steady-state amplitudes of the driven system and the effective
/// magnomechanical couplings G_j = i√2·g_db·⟨d_j⟩ they imply.
struct OperatingPoint {
  std::array<std::complex<double>, 2> a{};  // ⟨a_1⟩, ⟨a_2⟩
  std::array<std::complex<double>, 2> c{};
  std::array<std::complex<double>, 2> d{};
  std::array<double, 2> q{};                // mean displacements
  std::array<std::complex<double>, 2> G{};  // effective couplings [rad/s]
  double residual = 0.0;                    // relative residual of the solve
  double rcond = 0.0;                       // reciprocal condition estimate
};

/// Per-site |G_j| under the global phase convention arg⟨d_j⟩ = −π/2
/// (G real positive); `discarded_phase` is the rotation removed from each G.
struct EffectiveCoupling {
  std::array<double, 2> magnitude{};
  std::array<double, 2> discarded_phase{};
};

/// Solve the mean-field fixed point. The equations are linear in the twelve
/// real unknowns Re/Im(a_j, c_j, d_j) because squeezing couples d_j to d_j*;
/// they are solved by dense LU, then q_j = −g_db|⟨d_j⟩|²/ω_b.
/// With fold_mean_shift set, Δ_d is shifted by g_db⟨q_j⟩ and the solve is
/// iterated to self-consistency.
/// Throws: Error(validation) when no drive is configured; NumericalError
/// with the condition estimate when the system is singular.
OperatingPoint solve_operating_point(const SystemConfig& config);

EffectiveCoupling effective_coupling(const OperatingPoint& op);

/// Diagnostic JSON dump: amplitudes, residual, condition estimate.
std::string operating_point_json(const OperatingPoint& op);

}  // namespace magnomech
