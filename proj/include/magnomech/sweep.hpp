#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "magnomech/measures.hpp"

namespace magnomech {

/// Unit in which an axis grid is expressed. Ratio units are resolved against
/// the base config when the axis is applied.
enum class AxisUnit {
  rad_per_s,      // applied as-is
  hz_2pi,         // multiplied by 2π (the config-file convention)
  kelvin,
  seconds,        // time axis (evolve mode)
  omega_b_ratio,  // multiples of the base mechanical frequency
  g_a_ratio,      // multiples of the base magnon–cavity coupling
};

const char* to_string(AxisUnit unit);

struct AxisSpec {
  std::string name;  // swept parameter, or "t" for the time axis
  AxisUnit unit = AxisUnit::rad_per_s;
  std::vector<double> values;  // nonempty, strictly monotone
};

enum class SweepMode { steady, evolve };

struct SweepSpec {
  SystemConfig base;
  std::vector<AxisSpec> axes;  // 1 or 2; evolve mode: last axis must be "t"
  SweepMode mode = SweepMode::steady;
  double c0_scale = 0.5;  // initial covariance c0_scale·I for evolve mode
  std::string label = "custom";

  void validate() const;
};

/// One grid point. Unstable points carry no measures (NaN) but are always
/// present in the output.
struct PointRecord {
  double axis0 = 0.0;
  double axis1 = 0.0;  // unused (NaN) for 1-axis sweeps
  bool stable = false;
  MeasureSet measures{};
  double residual = 0.0;            // Lyapunov residual (steady rows; 0 for evolve)
  double min_symplectic_full = 0.0; // physicality of the full 16×16
  std::string note;                 // per-point error, empty when clean
};

struct SweepResult {
  SweepSpec spec;
  std::vector<std::string> columns;  // axis column names
  std::vector<PointRecord> rows;
  int unstable_rows = 0;
};

/// Resolve the per-site coupling feeding the drift matrix: taken directly
/// from G_db, or through the mean-field solve when a drive is configured.
std::array<double, 2> resolve_coupling(const SystemConfig& config);

/// Evaluate one configuration end to end (mean field where applicable,
/// then drift/diffusion, stability, steady covariance, measures).
PointRecord evaluate_steady_point(const SystemConfig& config);

/// Evaluate the full grid. Points are independent tasks; rows come back in
/// grid order regardless of worker count.
SweepResult run_sweep(const SweepSpec& spec, int workers = 1);

/// Paper-figure presets: fig1a, fig1b, fig1c, fig2a, fig2b, fig4, fig5, fig6.
/// The preset pins the figure's parameter point (detunings, J, T, λ) relative
/// to the base config's ω_b and g_a and defines the axes. Throws on unknown
/// names.
SweepSpec figure_preset(const std::string& name, const SystemConfig& base);

/// CSV body: header comments (version, label, config hash), one column row,
/// one line per grid point. Bit-identical across runs of the same spec.
void write_csv(const SweepResult& result, std::ostream& out);

/// JSON sidecar: resolved config, version, hash, axes, row diagnostics.
void write_sidecar(const SweepResult& result, std::ostream& out);

std::string csv_string(const SweepResult& result);
std::string sidecar_string(const SweepResult& result);

}  // namespace magnomech
