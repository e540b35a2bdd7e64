#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "magnomech/constants.hpp"

namespace magnomech {

/// Microwave drive of the magnon modes plus the optional cavity drive.
/// Holds the quantities needed to derive the Rabi frequency
/// Ω = (√5/4)·γ·√N·B0 and the bare magnomechanical coupling used by the
/// mean-field solve. All rates in rad/s.
struct DriveSpec {
  double B0 = 0.0;               // drive magnetic field amplitude [T]
  double sphere_diameter = 0.0;  // YIG sphere diameter [m]
  double rho_spin = constants::yig_spin_density;       // [m^-3]
  double gyromagnetic = constants::gyromagnetic_default;  // [rad/(s·T)]
  double g_db_bare = 0.0;        // bare single-magnon coupling [rad/s]
  std::optional<double> Omega;   // magnon Rabi drive [rad/s]; derived from B0 if unset
  double E = 0.0;                // cavity drive amplitude, site 1 only [rad/s]

  /// Ω as configured, or derived from (B0, diameter, rho, gyromagnetic).
  double rabi() const;
};

/// All physical parameters of the two-site model. Frequencies and rates are
/// angular (rad/s) throughout; the config file layer owns the "/2π in Hz"
/// conversion. Both sites share one parameter set (symmetric sites).
struct SystemConfig {
  double omega_b = 0.0;   // mechanical frequency
  double delta_a = 0.0;   // a-cavity detuning
  double delta_c = 0.0;   // c-cavity detuning
  double delta_d = 0.0;   // magnon detuning
  double kappa_a = 0.0;   // a-cavity decay
  double kappa_c = 0.0;   // c-cavity decay
  double kappa_d = 0.0;   // magnon decay
  double gamma_b = 0.0;   // mechanical damping
  double g_a = 0.0;       // magnon–a-cavity coupling
  double g_c = 0.0;       // magnon–c-cavity coupling
  double G_db = 0.0;      // effective magnomechanical coupling (direct form)
  double lambda = 0.0;    // magnon squeezing strength
  double theta = 0.0;     // squeezing phase [rad]
  double J_a = 0.0;       // a-cavity tunneling
  double J_c = 0.0;       // c-cavity tunneling
  double T = 0.0;         // bath temperature [K]
  double omega_a = 0.0;   // absolute a-cavity frequency (thermal occupation)
  double omega_c = 0.0;   // absolute c-cavity frequency
  double omega_d = 0.0;   // absolute magnon frequency

  bool symmetric_sites = true;
  bool full_linearization = false;  // include the phonon back-action term on X_d
  bool fold_mean_shift = false;     // fold g_db·<q> into Δ_d in the mean-field solve

  std::optional<DriveSpec> drive;

  /// Throws ConfigError listing every violated invariant.
  void validate() const;

  /// Thermal occupations at the absolute mode frequencies.
  double occupation_a() const;
  double occupation_c() const;
  double occupation_d() const;
  double occupation_b() const;
};

/// Mean thermal occupation [exp(ħω/k_B T) − 1]^−1. Returns exactly 0 at
/// T = 0 and underflows to 0 for ħω ≫ k_B T. Throws on ω ≤ 0.
double thermal_occupation(double omega, double T);

/// N = ρ·(4/3)π(d/2)³. Throws on d ≤ 0.
double spin_count(double diameter, double rho);

/// Ω = (√5/4)·γ·√N·B0. Throws on non-positive input.
double rabi_frequency(double B0, double N, double gamma);

/// Parse the key–value config format (see README for the grammar).
/// Throws ConfigError with line info on parse failure, or with the full
/// list of violated invariants on validation failure.
SystemConfig load_config(const std::string& path);
SystemConfig parse_config(const std::string& text, const std::string& origin = "<string>");

/// Canonical text form; load(save(c)) reproduces c to full double precision.
std::string to_config_text(const SystemConfig& config);
void save_config(const SystemConfig& config, const std::string& path);

/// FNV-1a hash of the canonical text; embedded in every output file.
std::uint64_t config_hash(const SystemConfig& config);
std::string config_hash_hex(const SystemConfig& config);

}  // namespace magnomech
