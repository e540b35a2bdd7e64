#include "magnomech/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <vector>

#include "magnomech/errors.hpp"

namespace magnomech {

namespace {

using constants::two_pi;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Hz value whose *2pi image is bitwise v, when one exists. v normally
// originates from a config read, so the witness is at most one ulp away.
double hz_for_roundtrip(double v) {
  double h = v / two_pi;
  if (h * two_pi == v) return h;
  double up = std::nextafter(h, std::numeric_limits<double>::infinity());
  if (up * two_pi == v) return up;
  double dn = std::nextafter(h, -std::numeric_limits<double>::infinity());
  if (dn * two_pi == v) return dn;
  return h;
}

struct RawEntry {
  std::string value;
  int line = 0;
  bool used = false;
};

using Section = std::map<std::string, RawEntry>;

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Pulls typed values out of one parsed section, collecting problems instead
// of failing fast so a bad config reports everything at once.
class Reader {
 public:
  Reader(std::map<std::string, Section>& sections, std::vector<std::string>& issues,
         const std::string& origin)
      : sections_(sections), issues_(issues), origin_(origin) {}

  bool has_section(const std::string& name) const {
    return sections_.count(name) != 0;
  }

  bool has_key(const std::string& sec, const std::string& key) {
    auto s = sections_.find(sec);
    return s != sections_.end() && s->second.count(key) != 0;
  }

  std::optional<double> number(const std::string& sec, const std::string& key) {
    RawEntry* e = fetch(sec, key);
    if (!e) return std::nullopt;
    const char* s = e->value.c_str();
    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end == s || *end != '\0') {
      issue(sec, key, e->line, "not a number: '" + e->value + "'");
      return std::nullopt;
    }
    if (!std::isfinite(v)) {
      issue(sec, key, e->line, "must be finite");
      return std::nullopt;
    }
    return v;
  }

  double number_required(const std::string& sec, const std::string& key) {
    if (!has_key(sec, key)) {
      issues_.push_back(sec + "." + key + ": missing required key");
      return 0.0;
    }
    return number(sec, key).value_or(0.0);
  }

  double number_or(const std::string& sec, const std::string& key, double dflt) {
    if (!has_key(sec, key)) return dflt;
    return number(sec, key).value_or(dflt);
  }

  bool flag_or(const std::string& sec, const std::string& key, bool dflt) {
    RawEntry* e = fetch(sec, key);
    if (!e) return dflt;
    if (e->value == "true" || e->value == "1") return true;
    if (e->value == "false" || e->value == "0") return false;
    issue(sec, key, e->line, "expected true/false");
    return dflt;
  }

  void finish() {
    for (auto& [sec, entries] : sections_) {
      for (auto& [key, e] : entries) {
        if (!e.used)
          issue(sec, key, e.line, "unknown key");
      }
    }
  }

 private:
  RawEntry* fetch(const std::string& sec, const std::string& key) {
    auto s = sections_.find(sec);
    if (s == sections_.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    k->second.used = true;
    return &k->second;
  }

  void issue(const std::string& sec, const std::string& key, int line,
             const std::string& what) {
    issues_.push_back(origin_ + ":" + std::to_string(line) + ": " + sec + "." +
                      key + ": " + what);
  }

  std::map<std::string, Section>& sections_;
  std::vector<std::string>& issues_;
  std::string origin_;
};

}  // namespace

double thermal_occupation(double omega, double T) {
  if (!(omega > 0.0))
    throw Error(ErrorCode::validation, "thermal_occupation: omega must be > 0");
  if (T < 0.0)
    throw Error(ErrorCode::validation, "thermal_occupation: T must be >= 0");
  if (T == 0.0) return 0.0;
  double x = (constants::hbar * omega) / (constants::k_boltzmann * T);
  return 1.0 / std::expm1(x);  // expm1 overflows to +inf -> occupation 0
}

double spin_count(double diameter, double rho) {
  if (!(diameter > 0.0))
    throw Error(ErrorCode::validation, "spin_count: diameter must be > 0");
  if (rho < 0.0)
    throw Error(ErrorCode::validation, "spin_count: rho must be >= 0");
  double r = 0.5 * diameter;
  return rho * (4.0 / 3.0) * constants::pi * r * r * r;
}

double rabi_frequency(double B0, double N, double gamma) {
  if (!(B0 > 0.0) || !(N > 0.0) || !(gamma > 0.0))
    throw Error(ErrorCode::validation, "rabi_frequency: inputs must be > 0");
  return 0.25 * std::sqrt(5.0) * gamma * std::sqrt(N) * B0;
}

double DriveSpec::rabi() const {
  if (Omega) return *Omega;
  return rabi_frequency(B0, spin_count(sphere_diameter, rho_spin), gyromagnetic);
}

double SystemConfig::occupation_a() const { return thermal_occupation(omega_a, T); }
double SystemConfig::occupation_c() const { return thermal_occupation(omega_c, T); }
double SystemConfig::occupation_d() const { return thermal_occupation(omega_d, T); }
double SystemConfig::occupation_b() const { return thermal_occupation(omega_b, T); }

void SystemConfig::validate() const {
  std::vector<std::string> issues;
  auto require = [&](bool ok, const std::string& msg) {
    if (!ok) issues.push_back(msg);
  };

  require(omega_b > 0.0, "system.omega_b: must be > 0");
  require(kappa_a >= 0.0, "system.kappa_a: must be >= 0");
  require(kappa_c >= 0.0, "system.kappa_c: must be >= 0");
  require(kappa_d >= 0.0, "system.kappa_d: must be >= 0");
  require(gamma_b >= 0.0, "system.gamma_b: must be >= 0");
  require(g_a >= 0.0, "system.g_a: must be >= 0");
  require(g_c >= 0.0, "system.g_c: must be >= 0");
  require(G_db >= 0.0, "system.G_db: must be >= 0");
  require(lambda >= 0.0, "system.lambda: must be >= 0");
  require(J_a >= 0.0, "system.J_a: must be >= 0");
  require(J_c >= 0.0, "system.J_c: must be >= 0");
  require(theta >= 0.0 && theta < two_pi, "system.theta: must be in [0, 2pi)");
  require(T >= 0.0, "bath.T: must be >= 0");
  require(omega_a > 0.0, "bath.omega_a: must be > 0");
  require(omega_c > 0.0, "bath.omega_c: must be > 0");
  require(omega_d > 0.0, "bath.omega_d: must be > 0");
  require(symmetric_sites,
          "flags.symmetric_sites: asymmetric site parameters are not supported");

  if (drive) {
    require(G_db == 0.0,
            "system.G_db and a [drive] section are mutually exclusive");
    require(drive->B0 > 0.0, "drive.B0: must be > 0");
    require(drive->sphere_diameter > 0.0, "drive.sphere_diameter: must be > 0");
    require(drive->rho_spin > 0.0, "drive.rho_spin: must be > 0");
    require(drive->gyromagnetic > 0.0, "drive.gyromagnetic: must be > 0");
    require(drive->g_db_bare > 0.0, "drive.g_db_bare: must be > 0");
    if (drive->Omega) require(*drive->Omega >= 0.0, "drive.Omega: must be >= 0");
    require(drive->E >= 0.0, "drive.E: must be >= 0");
  }

  if (!issues.empty()) {
    std::string msg = "invalid configuration (" + std::to_string(issues.size()) +
                      " problem" + (issues.size() == 1 ? "" : "s") + ")";
    for (const auto& i : issues) msg += "\n  " + i;
    throw ConfigError(ErrorCode::validation, msg, issues);
  }
}

SystemConfig parse_config(const std::string& text, const std::string& origin) {
  std::map<std::string, Section> sections;
  std::vector<std::string> issues;

  std::istringstream in(text);
  std::string line;
  std::string current;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(ErrorCode::parse,
                          origin + ":" + std::to_string(lineno) +
                              ": malformed section header '" + line + "'");
      current = trim(line.substr(1, line.size() - 2));
      if (current != "system" && current != "bath" && current != "flags" &&
          current != "drive")
        issues.push_back(origin + ":" + std::to_string(lineno) +
                         ": unknown section [" + current + "]");
      sections[current];
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(ErrorCode::parse, origin + ":" + std::to_string(lineno) +
                                              ": expected 'key = value'");
    if (current.empty())
      throw ConfigError(ErrorCode::parse, origin + ":" + std::to_string(lineno) +
                                              ": key outside any section");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    auto [it, inserted] = sections[current].emplace(key, RawEntry{value, lineno});
    if (!inserted)
      issues.push_back(origin + ":" + std::to_string(lineno) + ": " + current +
                       "." + key + ": duplicate key (first at line " +
                       std::to_string(it->second.line) + ")");
  }

  Reader r(sections, issues, origin);
  SystemConfig cfg;

  // [system]/[bath] frequency-like keys come in as nu [Hz]; stored as 2*pi*nu.
  auto freq_required = [&](const std::string& sec, const std::string& key) {
    return two_pi * r.number_required(sec, key);
  };
  cfg.omega_b = freq_required("system", "omega_b");
  cfg.delta_a = freq_required("system", "delta_a");
  cfg.delta_c = freq_required("system", "delta_c");
  cfg.delta_d = freq_required("system", "delta_d");
  cfg.kappa_a = freq_required("system", "kappa_a");
  cfg.kappa_c = freq_required("system", "kappa_c");
  cfg.kappa_d = freq_required("system", "kappa_d");
  cfg.gamma_b = freq_required("system", "gamma_b");
  cfg.g_a = freq_required("system", "g_a");
  cfg.g_c = freq_required("system", "g_c");
  cfg.J_a = freq_required("system", "J_a");
  cfg.J_c = freq_required("system", "J_c");
  cfg.G_db = two_pi * r.number_or("system", "G_db", 0.0);
  cfg.lambda = two_pi * r.number_or("system", "lambda", 0.0);
  cfg.theta = r.number_or("system", "theta", 0.0);  // radians, no folding

  cfg.T = r.number_required("bath", "T");
  cfg.omega_a = freq_required("bath", "omega_a");
  cfg.omega_c = freq_required("bath", "omega_c");
  cfg.omega_d = freq_required("bath", "omega_d");

  cfg.symmetric_sites = r.flag_or("flags", "symmetric_sites", true);
  cfg.full_linearization = r.flag_or("flags", "full_linearization", false);
  cfg.fold_mean_shift = r.flag_or("flags", "fold_mean_shift", false);

  if (r.has_section("drive")) {
    DriveSpec d;
    d.B0 = r.number_required("drive", "B0");
    d.sphere_diameter = r.number_required("drive", "sphere_diameter");
    d.rho_spin = r.number_or("drive", "rho_spin", constants::yig_spin_density);
    d.gyromagnetic =
        two_pi * r.number_or("drive", "gyromagnetic",
                             constants::gyromagnetic_default / two_pi);
    d.g_db_bare = r.number_required("drive", "g_db_bare");  // rad/s, no folding
    if (r.has_key("drive", "Omega"))
      d.Omega = r.number_or("drive", "Omega", 0.0);  // rad/s (angular)
    d.E = r.number_or("drive", "E", 0.0);            // rad/s (angular)
    cfg.drive = d;
  }

  r.finish();
  if (!issues.empty()) {
    std::string msg = "config rejected (" + std::to_string(issues.size()) +
                      " problem" + (issues.size() == 1 ? "" : "s") + ")";
    for (const auto& i : issues) msg += "\n  " + i;
    throw ConfigError(ErrorCode::validation, msg, issues);
  }

  cfg.validate();
  return cfg;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::io, "cannot open config file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str(), path);
}

std::string to_config_text(const SystemConfig& c) {
  std::ostringstream o;
  auto freq = [&](const char* key, double v) {
    o << key << " = " << fmt_double(hz_for_roundtrip(v)) << "\n";
  };
  auto raw = [&](const char* key, double v) {
    o << key << " = " << fmt_double(v) << "\n";
  };
  o << "# magnomech model configuration\n";
  o << "# [system]/[bath] frequency-like keys are in Hz with the /2pi convention\n";
  o << "# (omega = 2*pi*value); theta is in rad; drive Omega and E are in rad/s.\n";
  o << "\n[system]\n";
  freq("omega_b", c.omega_b);
  freq("delta_a", c.delta_a);
  freq("delta_c", c.delta_c);
  freq("delta_d", c.delta_d);
  freq("kappa_a", c.kappa_a);
  freq("kappa_c", c.kappa_c);
  freq("kappa_d", c.kappa_d);
  freq("gamma_b", c.gamma_b);
  freq("g_a", c.g_a);
  freq("g_c", c.g_c);
  if (!c.drive) freq("G_db", c.G_db);
  freq("lambda", c.lambda);
  raw("theta", c.theta);
  freq("J_a", c.J_a);
  freq("J_c", c.J_c);
  o << "\n[bath]\n";
  raw("T", c.T);
  freq("omega_a", c.omega_a);
  freq("omega_c", c.omega_c);
  freq("omega_d", c.omega_d);
  o << "\n[flags]\n";
  o << "symmetric_sites = " << (c.symmetric_sites ? "true" : "false") << "\n";
  o << "full_linearization = " << (c.full_linearization ? "true" : "false") << "\n";
  o << "fold_mean_shift = " << (c.fold_mean_shift ? "true" : "false") << "\n";
  if (c.drive) {
    const DriveSpec& d = *c.drive;
    o << "\n[drive]\n";
    raw("B0", d.B0);
    raw("sphere_diameter", d.sphere_diameter);
    raw("rho_spin", d.rho_spin);
    freq("gyromagnetic", d.gyromagnetic);
    raw("g_db_bare", d.g_db_bare);
    if (d.Omega) raw("Omega", *d.Omega);
    raw("E", d.E);
  }
  return o.str();
}

void save_config(const SystemConfig& config, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::io, "cannot write config file: " + path);
  f << to_config_text(config);
  if (!f) throw Error(ErrorCode::io, "write failed: " + path);
}

std::uint64_t config_hash(const SystemConfig& config) {
  std::string text = to_config_text(config);
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash_hex(const SystemConfig& config) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(config_hash(config)));
  return buf;
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse: return "parse";
    case ErrorCode::validation: return "validation";
    case ErrorCode::instability: return "instability";
    case ErrorCode::numerical: return "numerical";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

}  // namespace magnomech
