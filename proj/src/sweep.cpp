#include "magnomech/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "magnomech/errors.hpp"
#include "magnomech/meanfield.hpp"
#include "magnomech/version.hpp"

namespace magnomech {

namespace {

using constants::two_pi;
using json = nlohmann::ordered_json;

const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / double(n - 1);
  v.front() = lo;
  v.back() = hi;
  return v;
}

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  const double llo = std::log10(lo), lhi = std::log10(hi);
  for (int i = 0; i < n; ++i)
    v[i] = std::pow(10.0, llo + (lhi - llo) * i / double(n - 1));
  v.front() = lo;
  v.back() = hi;
  return v;
}

double resolve_axis_value(const SystemConfig& base, AxisUnit unit, double v) {
  switch (unit) {
    case AxisUnit::rad_per_s:
    case AxisUnit::kelvin:
    case AxisUnit::seconds:
      return v;
    case AxisUnit::hz_2pi:
      return v * two_pi;
    case AxisUnit::omega_b_ratio:
      return v * base.omega_b;
    case AxisUnit::g_a_ratio:
      return v * base.g_a;
  }
  return v;
}

void apply_axis(SystemConfig& c, const std::string& name, double v) {
  if (name == "delta_a") c.delta_a = v;
  else if (name == "delta_c") c.delta_c = v;
  else if (name == "delta_ac") c.delta_a = c.delta_c = v;
  else if (name == "delta_d") c.delta_d = v;
  else if (name == "lambda") c.lambda = v;
  else if (name == "J") c.J_a = c.J_c = v;
  else if (name == "J_a") c.J_a = v;
  else if (name == "J_c") c.J_c = v;
  else if (name == "G_db") c.G_db = v;
  else if (name == "kappa_a") c.kappa_a = v;
  else if (name == "kappa_c") c.kappa_c = v;
  else if (name == "kappa_d") c.kappa_d = v;
  else if (name == "gamma_b") c.gamma_b = v;
  else if (name == "theta") c.theta = v;
  else if (name == "T") c.T = v;
  else if (name == "omega_b") c.omega_b = v;
  else
    throw Error(ErrorCode::validation, "unknown sweep parameter '" + name + "'");
}

MeasureSet nan_measures() {
  return {kNaN, kNaN, kNaN, kNaN, kNaN, kNaN};
}

void run_tasks(int workers, size_t count, const std::function<void(size_t)>& task) {
  workers = std::max(1, workers);
  if (workers == 1 || count <= 1) {
    for (size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<size_t> next{0};
  auto loop = [&] {
    for (size_t i; (i = next.fetch_add(1)) < count;) task(i);
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(loop);
  for (auto& t : pool) t.join();
}

json config_json(const SystemConfig& c) {
  json j;
  j["omega_b"] = c.omega_b;
  j["delta_a"] = c.delta_a;
  j["delta_c"] = c.delta_c;
  j["delta_d"] = c.delta_d;
  j["kappa_a"] = c.kappa_a;
  j["kappa_c"] = c.kappa_c;
  j["kappa_d"] = c.kappa_d;
  j["gamma_b"] = c.gamma_b;
  j["g_a"] = c.g_a;
  j["g_c"] = c.g_c;
  j["G_db"] = c.G_db;
  j["lambda"] = c.lambda;
  j["theta"] = c.theta;
  j["J_a"] = c.J_a;
  j["J_c"] = c.J_c;
  j["T"] = c.T;
  j["omega_a"] = c.omega_a;
  j["omega_c"] = c.omega_c;
  j["omega_d"] = c.omega_d;
  j["symmetric_sites"] = c.symmetric_sites;
  j["full_linearization"] = c.full_linearization;
  j["fold_mean_shift"] = c.fold_mean_shift;
  if (c.drive) {
    json d;
    d["B0"] = c.drive->B0;
    d["sphere_diameter"] = c.drive->sphere_diameter;
    d["rho_spin"] = c.drive->rho_spin;
    d["gyromagnetic"] = c.drive->gyromagnetic;
    d["g_db_bare"] = c.drive->g_db_bare;
    if (c.drive->Omega) d["Omega"] = *c.drive->Omega;
    d["E"] = c.drive->E;
    j["drive"] = d;
  } else {
    j["drive"] = nullptr;
  }
  return j;
}

}  // namespace

const char* to_string(AxisUnit unit) {
  switch (unit) {
    case AxisUnit::rad_per_s: return "rad/s";
    case AxisUnit::hz_2pi: return "Hz(/2pi)";
    case AxisUnit::kelvin: return "K";
    case AxisUnit::seconds: return "s";
    case AxisUnit::omega_b_ratio: return "omega_b";
    case AxisUnit::g_a_ratio: return "g_a";
  }
  return "?";
}

void SweepSpec::validate() const {
  base.validate();
  if (axes.empty() || axes.size() > 2)
    throw Error(ErrorCode::validation, "sweep needs 1 or 2 axes");
  for (const auto& ax : axes) {
    if (ax.values.empty())
      throw Error(ErrorCode::validation, "axis '" + ax.name + "' has an empty grid");
    for (size_t i = 1; i < ax.values.size(); ++i) {
      const bool up = ax.values[1] > ax.values[0];
      if (up ? !(ax.values[i] > ax.values[i - 1])
             : !(ax.values[i] < ax.values[i - 1]))
        throw Error(ErrorCode::validation,
                    "axis '" + ax.name + "' must be strictly monotone");
    }
  }
  const bool has_time = axes.back().name == "t";
  if (mode == SweepMode::evolve) {
    if (!has_time)
      throw Error(ErrorCode::validation, "evolve sweep needs a final time axis 't'");
    if (axes.back().values.front() != 0.0)
      throw Error(ErrorCode::validation, "time axis must start at 0");
    if (!(c0_scale > 0.0))
      throw Error(ErrorCode::validation, "c0_scale must be positive");
  } else if (has_time) {
    throw Error(ErrorCode::validation, "steady sweep cannot have a time axis");
  }
  for (size_t k = 0; k + 1 < axes.size(); ++k)
    if (axes[k].name == "t")
      throw Error(ErrorCode::validation, "only the last axis may be time");
}

std::array<double, 2> resolve_coupling(const SystemConfig& config) {
  if (config.drive) {
    const OperatingPoint op = solve_operating_point(config);
    return effective_coupling(op).magnitude;
  }
  return {config.G_db, config.G_db};
}

PointRecord evaluate_steady_point(const SystemConfig& config) {
  config.validate();
  PointRecord row;
  const std::array<double, 2> G = resolve_coupling(config);
  const Mat16 K = assemble_drift(config, G);
  const Mat16 L = assemble_diffusion(config);
  const StabilityReport rep = stability(K);
  row.stable = rep.stable;
  if (!rep.stable) {
    row.measures = nan_measures();
    row.residual = kNaN;
    row.min_symplectic_full = kNaN;
    return row;
  }
  const SteadySolution sol = steady_covariance(K, L);
  row.measures = measure_all(sol.C);
  row.residual = sol.residual;
  row.min_symplectic_full = physicality_check(sol.C);
  return row;
}

SweepResult run_sweep(const SweepSpec& spec, int workers) {
  spec.validate();

  SweepResult result;
  result.spec = spec;
  for (const auto& ax : spec.axes) result.columns.push_back(ax.name);

  if (spec.mode == SweepMode::steady) {
    const AxisSpec& ax0 = spec.axes.front();
    const bool two_axes = spec.axes.size() == 2;
    const AxisSpec* ax1 = two_axes ? &spec.axes[1] : nullptr;
    const size_t n0 = ax0.values.size();
    const size_t n1 = two_axes ? ax1->values.size() : 1;
    result.rows.resize(n0 * n1);

    run_tasks(workers, n0 * n1, [&](size_t flat) {
      const size_t i = flat / n1, k = flat % n1;
      PointRecord& row = result.rows[flat];
      row.axis0 = ax0.values[i];
      row.axis1 = two_axes ? ax1->values[k] : kNaN;
      try {
        SystemConfig c = spec.base;
        apply_axis(c, ax0.name, resolve_axis_value(spec.base, ax0.unit, row.axis0));
        if (two_axes)
          apply_axis(c, ax1->name, resolve_axis_value(spec.base, ax1->unit, row.axis1));
        PointRecord r = evaluate_steady_point(c);
        r.axis0 = row.axis0;
        r.axis1 = row.axis1;
        row = std::move(r);
      } catch (const std::exception& e) {
        row.stable = false;
        row.measures = nan_measures();
        row.residual = kNaN;
        row.min_symplectic_full = kNaN;
        row.note = e.what();
      }
    });
  } else {
    const bool has_param = spec.axes.size() == 2;
    const AxisSpec& t_axis = spec.axes.back();
    const AxisSpec* p_axis = has_param ? &spec.axes.front() : nullptr;
    const size_t n_param = has_param ? p_axis->values.size() : 1;
    const size_t n_t = t_axis.values.size();
    result.rows.resize(n_param * n_t);

    run_tasks(workers, n_param, [&](size_t pi) {
      const double pval = has_param ? p_axis->values[pi] : kNaN;
      PointRecord* rows = result.rows.data() + pi * n_t;
      for (size_t k = 0; k < n_t; ++k) {
        rows[k].axis0 = has_param ? pval : t_axis.values[k];
        rows[k].axis1 = has_param ? t_axis.values[k] : kNaN;
      }
      try {
        SystemConfig c = spec.base;
        if (has_param)
          apply_axis(c, p_axis->name,
                     resolve_axis_value(spec.base, p_axis->unit, pval));
        c.validate();
        const std::array<double, 2> G = resolve_coupling(c);
        const Mat16 K = assemble_drift(c, G);
        const Mat16 L = assemble_diffusion(c);
        const StabilityReport rep = stability(K);
        if (!rep.stable) {
          for (size_t k = 0; k < n_t; ++k) {
            rows[k].stable = false;
            rows[k].measures = nan_measures();
            rows[k].residual = kNaN;
            rows[k].min_symplectic_full = kNaN;
          }
          return;
        }
        const Mat16 C0 = spec.c0_scale * Mat16::Identity();
        const double rate_bound =
            K.cwiseAbs().rowwise().sum().maxCoeff() + c.omega_b;
        const std::vector<Mat16> traj =
            evolve_covariance(K, L, C0, t_axis.values, rate_bound);
        for (size_t k = 0; k < n_t; ++k) {
          rows[k].stable = true;
          rows[k].measures = measure_all(traj[k]);
          rows[k].residual = 0.0;
          rows[k].min_symplectic_full = physicality_check(traj[k]);
        }
      } catch (const std::exception& e) {
        for (size_t k = 0; k < n_t; ++k) {
          rows[k].stable = false;
          rows[k].measures = nan_measures();
          rows[k].residual = kNaN;
          rows[k].min_symplectic_full = kNaN;
          rows[k].note = e.what();
        }
      }
    });
  }

  for (const auto& row : result.rows)
    if (!row.stable) ++result.unstable_rows;
  return result;
}

SweepSpec figure_preset(const std::string& name, const SystemConfig& base) {
  // Every preset starts from the paper's operating point, expressed
  // relative to the base config's mechanical frequency and coupling.
  SweepSpec spec;
  spec.base = base;
  spec.label = name;
  SystemConfig& c = spec.base;
  c.delta_a = c.delta_c = base.omega_b;
  c.delta_d = 0.4 * base.omega_b;
  c.J_a = c.J_c = 0.5 * base.g_a;
  c.T = 1e-4;
  c.lambda = 0.05 * base.g_a;

  auto detuning_axes = [&] {
    spec.axes = {
        {"delta_ac", AxisUnit::omega_b_ratio, linspace(0.0, 2.0, 101)},
        {"delta_d", AxisUnit::omega_b_ratio, linspace(0.0, 2.0, 101)},
    };
  };

  if (name == "fig1a") {
    c.lambda = 0.0;
    detuning_axes();
  } else if (name == "fig1b") {
    c.lambda = 0.005 * base.g_a;
    detuning_axes();
  } else if (name == "fig1c") {
    c.lambda = 0.05 * base.g_a;
    detuning_axes();
  } else if (name == "fig2a") {
    spec.axes = {
        {"lambda", AxisUnit::g_a_ratio, {0.02, 0.035, 0.05}},
        {"T", AxisUnit::kelvin, logspace(1e-4, 1.0, 201)},
    };
  } else if (name == "fig2b") {
    spec.axes = {{"lambda", AxisUnit::g_a_ratio, linspace(0.0, 0.06, 201)}};
  } else if (name == "fig4") {
    spec.axes = {
        {"T", AxisUnit::kelvin, {1e-4, 0.05, 0.1}},
        {"J", AxisUnit::g_a_ratio, linspace(0.0, 2.0, 201)},
    };
  } else if (name == "fig5") {
    spec.axes = {
        {"lambda", AxisUnit::g_a_ratio, {0.0, 0.02, 0.035, 0.05}},
        {"T", AxisUnit::kelvin, logspace(1e-4, 1.0, 201)},
    };
  } else if (name == "fig6") {
    spec.mode = SweepMode::evolve;
    // Matches the published curves, which start from a unit covariance
    // rather than (1/2)I; see README on initial conditions.
    spec.c0_scale = 1.0;
    spec.axes = {{"t", AxisUnit::seconds, linspace(0.0, 1e-6, 2001)}};
  } else {
    throw Error(ErrorCode::validation, "unknown figure preset '" + name + "'");
  }
  return spec;
}

void write_csv(const SweepResult& result, std::ostream& out) {
  const SweepSpec& spec = result.spec;
  out << "# magnomech " << kVersion << "\n";
  out << "# label=" << spec.label
      << " mode=" << (spec.mode == SweepMode::steady ? "steady" : "evolve");
  if (spec.mode == SweepMode::evolve)
    out << " c0_scale=" << fmt_double(spec.c0_scale);
  out << " full_linearization=" << (spec.base.full_linearization ? 1 : 0)
      << " config_hash=" << config_hash_hex(spec.base) << "\n";
  out << "# axis units:";
  for (const auto& ax : spec.axes)
    out << " " << ax.name << "[" << to_string(ax.unit) << "]";
  out << "\n";

  for (size_t k = 0; k < result.columns.size(); ++k)
    out << (k ? "," : "") << result.columns[k];
  out << ",E_dd,purity,S_c,S_p,nu_minus,stable,residual\n";

  const bool two_axes = result.columns.size() == 2;
  for (const auto& row : result.rows) {
    out << fmt_double(row.axis0);
    if (two_axes) out << ',' << fmt_double(row.axis1);
    out << ',' << fmt_double(row.measures.E_dd) << ','
        << fmt_double(row.measures.purity) << ',' << fmt_double(row.measures.S_c)
        << ',' << fmt_double(row.measures.S_p) << ','
        << fmt_double(row.measures.nu_minus) << ',' << (row.stable ? 1 : 0) << ','
        << fmt_double(row.residual) << "\n";
  }
}

void write_sidecar(const SweepResult& result, std::ostream& out) {
  const SweepSpec& spec = result.spec;
  json j;
  j["tool"] = "magnomech";
  j["version"] = kVersion;
  j["label"] = spec.label;
  j["mode"] = spec.mode == SweepMode::steady ? "steady" : "evolve";
  j["config_hash"] = config_hash_hex(spec.base);
  if (spec.mode == SweepMode::evolve) j["c0_scale"] = spec.c0_scale;

  json axes = json::array();
  for (const auto& ax : spec.axes) {
    json a;
    a["name"] = ax.name;
    a["unit"] = to_string(ax.unit);
    a["count"] = ax.values.size();
    a["first"] = ax.values.front();
    a["last"] = ax.values.back();
    axes.push_back(a);
  }
  j["axes"] = axes;

  json cols = json::array();
  for (const auto& c : result.columns) cols.push_back(c);
  for (const char* c : {"E_dd", "purity", "S_c", "S_p", "nu_minus", "stable", "residual"})
    cols.push_back(c);
  j["columns"] = cols;

  j["rows"] = result.rows.size();
  j["unstable_rows"] = result.unstable_rows;

  double min_sympl = std::numeric_limits<double>::infinity();
  double max_resid = 0.0;
  size_t noted = 0;
  for (const auto& row : result.rows) {
    if (row.stable) {
      min_sympl = std::min(min_sympl, row.min_symplectic_full);
      if (std::isfinite(row.residual)) max_resid = std::max(max_resid, row.residual);
    }
    if (!row.note.empty()) ++noted;
  }
  j["min_symplectic_full"] = std::isfinite(min_sympl) ? json(min_sympl) : json(nullptr);
  j["max_residual"] = max_resid;
  j["error_rows"] = noted;
  j["config"] = config_json(spec.base);
  j["config_units"] = "rad/s, K, T, m; see config file grammar in the README";

  out << j.dump(2) << "\n";
}

std::string csv_string(const SweepResult& result) {
  std::ostringstream o;
  write_csv(result, o);
  return o.str();
}

std::string sidecar_string(const SweepResult& result) {
  std::ostringstream o;
  write_sidecar(result, o);
  return o.str();
}

}  // namespace magnomech
