#include "dyad/config.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace dyad::cli {
namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& body) {
  std::vector<std::string> items;
  std::string cur;
  for (char c : body) {
    if (c == ',') {
      items.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  const std::string last = trim(cur);
  if (!last.empty()) items.push_back(last);
  return items;
}

// every key the schema knows, with its value class
enum class Kind { Real, Int, Str };
const std::map<std::string, Kind>& schema() {
  static const std::map<std::string, Kind> s = {
      {"command", Kind::Str},
      {"sweep_command", Kind::Str},
      {"model.variant", Kind::Str},
      {"model.lambda", Kind::Real},
      {"model.theta", Kind::Real},
      {"model.alpha", Kind::Real},
      {"model.beta", Kind::Real},
      {"model.nu", Kind::Real},
      {"model.mu", Kind::Real},
      {"model.coeffs", Kind::Str},
      {"numerics.n_shells", Kind::Int},
      {"numerics.dt", Kind::Real},
      {"numerics.t_end", Kind::Real},
      {"numerics.grid_m", Kind::Int},
      {"numerics.j_max", Kind::Int},
      {"numerics.store_every", Kind::Int},
      {"initial.kind", Kind::Str},
      {"initial.amplitude", Kind::Real},
      {"initial.decay", Kind::Real},
      {"initial.shell", Kind::Int},
      {"initial.value", Kind::Real},
      {"forcing.kind", Kind::Str},
      {"construction.rho", Kind::Real},
      {"construction.q_amplitude", Kind::Real},
      {"construction.d0", Kind::Real},
      {"construction.p_fixed", Kind::Real},
      {"construction.p_min", Kind::Real},
      {"construction.p_max", Kind::Real},
      {"construction.q_min", Kind::Real},
      {"construction.q_max", Kind::Real},
      {"construction.n_coarse", Kind::Int},
      {"construction.r_target", Kind::Real},
      {"io.out", Kind::Str},
      {"io.formats", Kind::Str},
  };
  return s;
}

const std::set<std::string>& known_commands() {
  static const std::set<std::string> c = {"simulate",       "construct",
                                          "verify",         "demo-nonunique",
                                          "demo-unique",    "sweep"};
  return c;
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key, "config error: key '" + key +
                               "' has a non-numeric value '" + v + "'");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const int x = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key, "config error: key '" + key +
                               "' has a non-integer value '" + v + "'");
  }
}

struct Reader {
  const RawConfig& raw;
  std::set<std::string> consumed;

  bool has(const std::string& key) { return raw.has(key); }

  std::string str(const std::string& key, const std::string& fallback) {
    auto it = raw.entries.find(key);
    if (it == raw.entries.end()) return fallback;
    consumed.insert(key);
    return it->second.raw;
  }
  std::string require_str(const std::string& key) {
    auto it = raw.entries.find(key);
    if (it == raw.entries.end())
      throw ConfigError(key, "config error: missing required key '" + key + "'");
    consumed.insert(key);
    return it->second.raw;
  }
  double real(const std::string& key, double fallback) {
    auto it = raw.entries.find(key);
    if (it == raw.entries.end()) return fallback;
    consumed.insert(key);
    return parse_real(key, it->second.raw);
  }
  double require_real(const std::string& key) {
    return parse_real(key, require_str(key));
  }
  int integer(const std::string& key, int fallback) {
    auto it = raw.entries.find(key);
    if (it == raw.entries.end()) return fallback;
    consumed.insert(key);
    return parse_int(key, it->second.raw);
  }
};

}  // namespace

RawConfig parse_config_text(const std::string& text) {
  RawConfig cfg;
  cfg.source_text = text;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("", "config error: malformed section header at line " +
                                  std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("", "config error: expected key = value at line " +
                                std::to_string(lineno));
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!section.empty()) key = section + "." + key;
    if (cfg.entries.count(key))
      throw ConfigError(key, "config error: duplicate key '" + key + "'");
    ConfigValue v;
    if (!value.empty() && value.front() == '[') {
      if (value.back() != ']')
        throw ConfigError(key, "config error: unterminated list for key '" + key + "'");
      v.is_list = true;
      v.items = split_list(value.substr(1, value.size() - 2));
      if (v.items.empty())
        v.raw = "";  // empty range
      else
        v.raw = v.items.front();
    } else {
      v.raw = value;
      v.items = {value};
    }
    cfg.entries.emplace(std::move(key), std::move(v));
  }
  return cfg;
}

RawConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("", "config error: cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::vector<std::string> ranged_keys(const RawConfig& raw) {
  std::vector<std::string> keys;
  for (const auto& [k, v] : raw.entries)
    if (v.is_list) keys.push_back(k);
  return keys;
}

RawConfig substitute(const RawConfig& raw, const std::string& key,
                     const std::string& value) {
  RawConfig out = raw;
  ConfigValue v;
  v.raw = value;
  v.items = {value};
  out.entries[key] = std::move(v);
  return out;
}

RunSettings resolve_settings(const RawConfig& raw, const Overrides& overrides) {
  // unknown keys are rejected before anything else
  for (const auto& [key, value] : raw.entries) {
    if (!schema().count(key))
      throw ConfigError(key, "config error: unknown key '" + key + "'");
    (void)value;
  }

  Reader r{raw, {}};
  RunSettings s;
  s.command = r.require_str("command");
  if (!known_commands().count(s.command))
    throw ConfigError("command",
                      "config error: unknown command '" + s.command + "'");
  if (s.command != "sweep" && !ranged_keys(raw).empty())
    throw ConfigError(ranged_keys(raw).front(),
                      "config error: ranged value for key '" +
                          ranged_keys(raw).front() +
                          "' is only allowed with the sweep command");

  // the sweep driver needs only the io block; every grid point is resolved
  // (and fully validated) on its own later
  if (s.command == "sweep") {
    s.out_dir = r.str("io.out", "");
    if (overrides.out_dir) s.out_dir = *overrides.out_dir;
    if (s.out_dir.empty()) {
      const char* env = std::getenv("DYAD_OUT");
      s.out_dir = env ? std::string(env) + "/run" : "dyad_out";
    }
    s.workers = overrides.workers;
    s.seed = overrides.seed;
    return s;
  }

  // model block: variant and lambda are always required
  const std::string vname = r.require_str("model.variant");
  Variant variant;
  try {
    variant = variant_from_name(vname);
  } catch (const std::exception& e) {
    throw ConfigError("model.variant", std::string("config error: ") + e.what());
  }
  const double lambda = r.require_real("model.lambda");
  const double nu = r.real("model.nu", 1.0);
  const double mu = r.real("model.mu", 1.0);
  try {
    switch (variant) {
      case Variant::GeneralMhd: {
        const std::string coeffs = r.str("model.coeffs", "1, -1, 1");
        const auto items = split_list(coeffs);
        if (items.size() != 3)
          throw ConfigError("model.coeffs",
                            "config error: key 'model.coeffs' needs three values");
        CascadeCoeffs c{parse_real("model.coeffs", items[0]),
                        parse_real("model.coeffs", items[1]),
                        parse_real("model.coeffs", items[2])};
        s.model = Model::general_mhd(lambda, r.require_real("model.theta"), c,
                                     nu, mu);
        break;
      }
      case Variant::MhdForward:
        s.model = Model::mhd_forward(lambda, r.require_real("model.theta"), nu, mu);
        break;
      case Variant::MhdMixed:
        s.model = Model::mhd_mixed(lambda, r.require_real("model.theta"), nu, mu);
        break;
      case Variant::NseClassic:
        s.model = Model::nse_classic(lambda, r.require_real("model.theta"), nu);
        break;
      case Variant::NseFractional:
        s.model = Model::nse_fractional(lambda, r.require_real("model.alpha"), nu);
        break;
      case Variant::MhdFractional:
        s.model = Model::mhd_fractional(lambda, r.require_real("model.alpha"),
                                        r.require_real("model.beta"), nu, mu);
        break;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("model", std::string("config error: ") + e.what());
  }

  s.n_shells = r.integer("numerics.n_shells", 12);
  s.dt = r.real("numerics.dt", 1e-3);
  s.t_end = r.real("numerics.t_end", 1.0);
  s.grid_m = r.integer("numerics.grid_m", 4096);
  s.j_max = r.integer("numerics.j_max", 12);
  s.store_every = r.integer("numerics.store_every", 1);

  s.initial_kind = r.str("initial.kind", "zero");
  if (s.initial_kind != "zero" && s.initial_kind != "decaying" &&
      s.initial_kind != "impulse" && s.initial_kind != "random")
    throw ConfigError("initial.kind", "config error: key 'initial.kind' must be "
                                      "zero, decaying, impulse or random");
  s.initial_amplitude = r.real("initial.amplitude", 0.4);
  s.initial_decay = r.real("initial.decay", 2.0);
  s.initial_shell = r.integer("initial.shell", 0);
  s.initial_value = r.real("initial.value", 1.0);

  s.forcing_kind = r.str("forcing.kind", "zero");
  if (s.forcing_kind != "zero" && s.forcing_kind != "synthesized")
    throw ConfigError("forcing.kind",
                      "config error: key 'forcing.kind' must be zero or synthesized");

  s.rho = r.real("construction.rho", 0.0);
  s.q_amplitude = r.real("construction.q_amplitude", 1.0);
  s.d0 = r.real("construction.d0", 1.0);
  if (r.has("construction.p_fixed"))
    s.fixed_p = r.require_real("construction.p_fixed");
  s.p_min = r.real("construction.p_min", -50.0);
  s.p_max = r.real("construction.p_max", 50.0);
  s.q_min = r.real("construction.q_min", -50.0);
  s.q_max = r.real("construction.q_max", 50.0);
  s.n_coarse = r.integer("construction.n_coarse", 101);
  s.r_target = r.real("construction.r_target", 0.0);

  s.out_dir = r.str("io.out", "");
  const std::string formats = r.str("io.formats", "csv,json");
  s.write_csv = formats.find("csv") != std::string::npos;
  s.write_json = formats.find("json") != std::string::npos;

  if (overrides.out_dir) s.out_dir = *overrides.out_dir;
  if (s.out_dir.empty()) {
    const char* env = std::getenv("DYAD_OUT");
    s.out_dir = env ? std::string(env) + "/run" : "dyad_out";
  }
  s.workers = overrides.workers;
  s.seed = overrides.seed;

  // basic sanity on the numerics block
  if (s.n_shells < 0)
    throw ConfigError("numerics.n_shells", "config error: key 'numerics.n_shells' must be >= 0");
  if (!(s.dt > 0.0))
    throw ConfigError("numerics.dt", "config error: key 'numerics.dt' must be positive");
  if (!(s.t_end > 0.0))
    throw ConfigError("numerics.t_end", "config error: key 'numerics.t_end' must be positive");
  if (s.grid_m < 8)
    throw ConfigError("numerics.grid_m", "config error: key 'numerics.grid_m' must be >= 8");
  if (s.j_max < 2)
    throw ConfigError("numerics.j_max", "config error: key 'numerics.j_max' must be >= 2");
  if (s.store_every < 1)
    throw ConfigError("numerics.store_every",
                      "config error: key 'numerics.store_every' must be >= 1");
  return s;
}

std::string content_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace dyad::cli
