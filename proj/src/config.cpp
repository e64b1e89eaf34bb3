#include "levylab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace levylab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

IniConfig IniConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str(), path);
}

IniConfig IniConfig::parse_string(const std::string& text,
                                  const std::string& origin) {
  IniConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw config_error(origin + ":" + std::to_string(line_no) +
                           ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw config_error(origin + ":" + std::to_string(line_no) +
                           ": empty section name");
      }
      cfg.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw config_error(origin + ":" + std::to_string(line_no) +
                         ": expected 'key = value' in line '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw config_error(origin + ":" + std::to_string(line_no) +
                         ": empty key");
    }
    if (section.empty()) {
      throw config_error(origin + ":" + std::to_string(line_no) +
                         ": key '" + key + "' outside any [section]");
    }
    cfg.sections_[section][key] = value;
  }
  return cfg;
}

bool IniConfig::has(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

std::string IniConfig::get(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return fallback;
  const auto k = s->second.find(key);
  return k == s->second.end() ? fallback : k->second;
}

std::string IniConfig::require(const std::string& section,
                               const std::string& key) const {
  if (!has(section, key)) {
    throw config_error("missing required config field [" + section + "] " +
                       key);
  }
  return get(section, key, "");
}

double IniConfig::get_double(const std::string& section, const std::string& key,
                             double fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key, "");
  try {
    std::size_t used = 0;
    const double parsed = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return parsed;
  } catch (const std::exception&) {
    throw config_error("field [" + section + "] " + key +
                       " is not a number: '" + v + "'");
  }
}

int IniConfig::get_int(const std::string& section, const std::string& key,
                       int fallback) const {
  const double v = get_double(section, key, double(fallback));
  const int i = static_cast<int>(v);
  if (double(i) != v) {
    throw config_error("field [" + section + "] " + key +
                       " must be an integer");
  }
  return i;
}

std::uint64_t IniConfig::get_u64(const std::string& section,
                                 const std::string& key,
                                 std::uint64_t fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key, "");
  try {
    std::size_t used = 0;
    const std::uint64_t parsed = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return parsed;
  } catch (const std::exception&) {
    throw config_error("field [" + section + "] " + key +
                       " is not an unsigned integer: '" + v + "'");
  }
}

bool IniConfig::get_bool(const std::string& section, const std::string& key,
                         bool fallback) const {
  if (!has(section, key)) return fallback;
  std::string v = get(section, key, "");
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw config_error("field [" + section + "] " + key +
                     " is not a boolean: '" + v + "'");
}

void IniConfig::set(const std::string& section, const std::string& key,
                    const std::string& value) {
  sections_[section][key] = value;
}

std::string IniConfig::canonical() const {
  // Experiment identity: every field that can influence results. The output
  // directory and the worker count are delivery plumbing (reductions are
  // deterministic), so they stay outside the hash.
  std::string out;
  for (const auto& [section, kv] : sections_) {
    if (section == "output") continue;
    for (const auto& [key, value] : kv) {
      if (section == "run" && key == "threads") continue;
      out += section;
      out += '.';
      out += key;
      out += '=';
      out += value;
      out += '\n';
    }
  }
  return out;
}

std::uint64_t IniConfig::hash() const {
  const std::string c = canonical();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char byte : c) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string IniConfig::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash()));
  return buf;
}

StateKernel build_kernel(const IniConfig& cfg) {
  const int dim = cfg.get_int("kernel", "dim", 1);
  if (dim != 1 && dim != 2) {
    throw config_error("field [kernel] dim must be 1 or 2");
  }
  const std::string preset = cfg.get("kernel", "preset", "");
  const double eps = cfg.get_double("kernel", "epsilon", 0.5);
  if (!preset.empty()) {
    try {
      return make_preset_kernel(preset, dim, eps);
    } catch (const std::domain_error& e) {
      throw config_error(std::string("field [kernel] preset: ") + e.what());
    }
  }

  RadialProfile profile;
  const std::string ptype = cfg.get("profile", "type", "constant");
  if (ptype == "constant") {
    profile = constant_profile();
  } else if (ptype == "log") {
    profile = log_profile();
  } else if (ptype == "power") {
    profile = power_profile(cfg.get_double("profile", "alpha", 0.5));
  } else {
    throw config_error("field [profile] type: unknown '" + ptype + "'");
  }
  profile.kappa = cfg.get_double("profile", "kappa", profile.kappa);

  JumpDensity J;
  const std::string tail = cfg.get("tail", "type", "exp");
  try {
    J = make_jump_density(dim, profile, tail);
  } catch (const std::domain_error& e) {
    throw config_error(std::string("field [tail] type: ") + e.what());
  }

  Perturbation A;
  const std::string family = cfg.get("perturbation", "family", "constant");
  try {
    A = make_perturbation(family, dim,
                          cfg.get_double("perturbation", "eps", eps),
                          cfg.get_double("perturbation", "c1", 1.0),
                          cfg.get_double("perturbation", "c2", 1.0));
  } catch (const std::domain_error& e) {
    throw config_error(std::string("field [perturbation] family: ") + e.what());
  }
  if (cfg.has("perturbation", "xi")) {
    A.xi_declared = cfg.get_double("perturbation", "xi", 0.0);
  }

  ModulusFunction psi;
  try {
    psi = make_modulus(cfg.get("modulus", "type", "reciprocal"),
                       cfg.get_double("modulus", "eps", eps));
  } catch (const std::domain_error& e) {
    throw config_error(std::string("field [modulus] type: ") + e.what());
  }
  return make_state_kernel(J, A, psi);
}

PathConfig build_path_config(const IniConfig& cfg) {
  PathConfig pc;
  const int dim = cfg.get_int("kernel", "dim", 1);
  pc.x0 = zero_point(dim);
  pc.x0[0] = cfg.get_double("paths", "x0", 0.0);
  if (dim == 2) pc.x0[1] = cfg.get_double("paths", "x0_y", 0.0);
  pc.n = cfg.get_int("paths", "n", 12);
  pc.horizon = cfg.get_double("paths", "horizon", 8.0);
  pc.eps_cut = cfg.get_double("paths", "eps_cut", 0x1p-10);
  pc.gaussian_correction = cfg.get_bool("paths", "gaussian_correction", true);
  pc.seed = cfg.get_u64("run", "seed", 1);
  pc.path_count = static_cast<std::size_t>(
      cfg.get_u64("paths", "count", 10000));
  pc.threads = static_cast<unsigned>(cfg.get_u64("run", "threads", 1));
  pc.drift_corruption = cfg.get_double("paths", "drift_corruption", 0.0);
  if (pc.n < 1 || pc.n > 24) throw config_error("[paths] n must be in 1..24");
  const double steps = pc.horizon / pc.dt();
  if (std::abs(steps - std::llround(steps)) > 1e-9) {
    throw config_error("[paths] horizon must be a multiple of 2^-n");
  }
  if (pc.path_count < 1) throw config_error("[paths] count must be >= 1");
  if (!(pc.eps_cut > 0.0) || !(pc.eps_cut < 1.0)) {
    throw config_error("[paths] eps_cut must lie in (0,1)");
  }
  return pc;
}

}  // namespace levylab
